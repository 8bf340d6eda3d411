#pragma once

#include "multindex/dad_solver.hpp"
#include "multindex/dataset.hpp"
#include "multindex/errors.hpp"
#include "multindex/linear_solver.hpp"
#include "multindex/method.hpp"
#include "multindex/neary_solver.hpp"
#include "multindex/solution.hpp"

namespace multindex {

/// Dispatches to the solver family of the requested method. RAO76 is
/// diagnostic and returns a conditional solution; call solve_rao76 directly.
inline Solution solve(const Dataset& d, const MethodSpec& spec) {
    if (is_linear_method(spec.method)) return solve_linear(d, spec);
    if (is_share_method(spec.method)) return solve_share_system(d, spec);
    if (spec.method == Method::NEARY) {
        if (!spec.preference) throw Error("solve: neary requires a preference specification");
        return solve_neary(d, *spec.preference, spec);
    }
    throw UnsupportedMethodError("solve: " + method_name(spec.method) +
                                 " does not emit an unconditional solution");
}

} // namespace multindex
