#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "multindex/connectivity.hpp"
#include "multindex/dataset.hpp"
#include "multindex/demand.hpp"
#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"
#include "multindex/method.hpp"
#include "multindex/residual.hpp"
#include "multindex/solution.hpp"

namespace multindex {

/// Outcome of the diagnostic Rao-1976 solve. The system lacks the weight
/// compatibility that forces the eigenvalue to one, so a Solution is only
/// emitted when the converged eigenvalue is 1 within 1e-8; the eigenpair is
/// always reported.
struct Rao76Result {
    double lambda = 0.0;
    int iterations = 0;
    std::vector<double> p_eigenvector; // geometric mean one
    std::optional<Solution> solution;
};

namespace detail {

struct DemandIterationState {
    std::vector<double> p;      // current international prices, geomean one
    std::vector<double> g;      // composed map applied to p
    std::vector<double> inv_ppp;
    int iterations = 0;
    double lambda = 0.0;
};

/// Damped fixed-point iteration on international prices for the composed
/// map of the demand-based systems. `observed_denominator` switches the
/// price-block weights between optimal (Neary) and observed (Rao-1976)
/// quantities.
inline DemandIterationState iterate_demand_system(const Dataset& d, const PreferenceSpec& pref,
                                                  double tol, int max_iter,
                                                  bool observed_denominator) {
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;

    std::vector<double> expenditure(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) expenditure[j] += d.prices(i, j) * d.quantities(i, j);
    std::vector<double> row_q(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) row_q[i] += d.quantities(i, j);

    auto geomean_one = [](std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += std::log(x);
        const double scale = std::exp(acc / static_cast<double>(v.size()));
        for (double& x : v) x /= scale;
    };

    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += std::log(d.prices(i, j));
        p[i] = std::exp(acc / static_cast<double>(m));
    }
    geomean_one(p);

    DemandIterationState st;
    st.inv_ppp.assign(m, 0.0);
    st.g.assign(n, 0.0);

    const double theta = 0.5; // damping; monotonicity of the map is unproven
    std::deque<double> recent_defects;
    int it = 0;
    bool converged = false;
    double defect = 0.0, lambda = 1.0;

    auto apply_map = [&](const std::vector<double>& price) {
        const Matrix q_star = hicksian_demand(price, d, pref).q_star;
        for (std::size_t j = 0; j < m; ++j) {
            double cost = 0.0;
            for (std::size_t i = 0; i < n; ++i) cost += q_star(i, j) * price[i];
            st.inv_ppp[j] = cost / expenditure[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double denom = 0.0;
            if (observed_denominator) {
                denom = row_q[i];
            } else {
                for (std::size_t j = 0; j < m; ++j) denom += q_star(i, j);
            }
            double num = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                if (d.quantities(i, j) > 0.0)
                    num += d.prices(i, j) * d.quantities(i, j) * st.inv_ppp[j];
            st.g[i] = num / denom;
        }
    };

    auto fail = [&](const std::string& reason) {
        std::string tail = "last eigen defects:";
        for (double x : recent_defects) tail += " " + std::to_string(x);
        throw NoConvergenceError(it, defect, reason + "; " + tail);
    };

    for (; it < max_iter; ++it) {
        apply_map(p);
        // Eigen defect of the current iterate against the running scaling
        // estimate; both sides settle once P approaches an eigenvector.
        double log_ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) log_ratio += std::log(st.g[i] / p[i]);
        lambda = std::exp(log_ratio / static_cast<double>(n));
        defect = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            defect = std::max(defect, std::abs(st.g[i] - lambda * p[i]) / (lambda * p[i]));
        recent_defects.push_back(defect);
        if (recent_defects.size() > 5) recent_defects.pop_front();
        if (defect < tol) {
            converged = true;
            break;
        }

        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = (1.0 - theta) * p[i] + theta * st.g[i];
        geomean_one(next);
        double lo = next[0], hi = next[0];
        for (double x : next) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (!std::isfinite(hi) || !(lo > 0.0) || hi / lo > 1e12)
            fail("demand-system iterates drift toward the boundary of the positive orthant "
                 "(no interior solution reachable from this start)");
        p.swap(next);
    }
    if (!converged)
        fail("demand-system iteration did not converge in " + std::to_string(max_iter) +
             " iterations");

    st.lambda = lambda;
    st.p = std::move(p);
    st.iterations = it + 1;
    return st;
}

inline Solution demand_state_to_solution(const Dataset& d, const MethodSpec& spec,
                                         const detail::DemandIterationState& st) {
    Solution sol;
    sol.p_int = st.p;
    sol.ppp.resize(d.n_countries);
    for (std::size_t j = 0; j < d.n_countries; ++j) sol.ppp[j] = 1.0 / st.inv_ppp[j];
    sol.iterations = st.iterations;
    sol.lambda_estimate = st.lambda;
    sol = normalize_solution(std::move(sol), spec.normalization);
    sol.residual_norm = residual(d, spec, sol);
    return sol;
}

} // namespace detail

/// Solves the cost-of-living system with optimal quantities from the given
/// preference family. The composed price map is homogeneous of degree one,
/// and at any converged eigenpair the eigenvalue must be one; the estimate
/// is recorded on the Solution.
inline Solution solve_neary(const Dataset& d, const PreferenceSpec& pref,
                            MethodSpec spec = {}) {
    spec.method = Method::NEARY;
    spec.preference = pref;
    validate_method_spec(spec);

    ConnectivityReport conn = is_connected(d.quantities);
    if (!conn.connected) throw DisconnectedError(std::move(conn));

    const detail::DemandIterationState st = detail::iterate_demand_system(
        d, pref, effective_tol(spec), effective_max_iter(spec), /*observed_denominator=*/false);
    return detail::demand_state_to_solution(d, spec, st);
}

/// The Rao-1976 variant defines international prices with observed-quantity
/// weights, which breaks the compatibility between the two blocks: the
/// converged eigenvalue need not be one, so this solver is diagnostic.
inline Rao76Result solve_rao76(const Dataset& d, const PreferenceSpec& pref,
                               MethodSpec spec = {}) {
    spec.method = Method::RAO76;
    spec.preference = pref;
    validate_method_spec(spec);

    ConnectivityReport conn = is_connected(d.quantities);
    if (!conn.connected) throw DisconnectedError(std::move(conn));

    const detail::DemandIterationState st = detail::iterate_demand_system(
        d, pref, effective_tol(spec), effective_max_iter(spec), /*observed_denominator=*/true);

    Rao76Result res;
    res.lambda = st.lambda;
    res.iterations = st.iterations;
    res.p_eigenvector = st.p;
    if (std::abs(st.lambda - 1.0) <= 1e-8)
        res.solution = detail::demand_state_to_solution(d, spec, st);
    return res;
}

} // namespace multindex
