#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "multindex/dad_solver.hpp"
#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"
#include "multindex/solve.hpp"

namespace multindex {

// Brute-force references for certifying the main solvers on small
// instances. Everything here is deliberately independent of the solver
// implementations: dense elimination instead of power iteration, exhaustive
// subset enumeration instead of max flow / union-find.

struct OracleVerdict {
    bool agrees = false;
    double max_rel_dev = 0.0;
    std::string detail;
};

struct SubsetCompatibilityResult {
    bool compatible = false;
    bool strict = false;
    // Tight pairs (I^c, J) found during enumeration and whether the opposing
    // block A_IJ contains a positive entry (which would violate strictness).
    struct TightPair {
        std::vector<std::size_t> rows;
        std::vector<std::size_t> cols;
        bool opposing_block_nonzero = false;
    };
    std::vector<TightPair> tight_pairs;
};

/// Basis of the eigenvalue-1 eigenspace of F, by Gaussian elimination on
/// (F - I) with complete pivoting. Rank cutoff is 1e-10 times the largest
/// entry magnitude. M <= 12.
inline std::vector<std::vector<double>> nullspace_oracle(const Matrix& f) {
    const std::size_t m = f.rows();
    if (f.cols() != m) throw Error("nullspace_oracle: matrix must be square");
    if (m > 12) throw TooLargeError("nullspace_oracle: M must be at most 12");

    Matrix a(m, m);
    double largest = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            a(i, j) = f(i, j) - (i == j ? 1.0 : 0.0);
            largest = std::max(largest, std::abs(a(i, j)));
        }
    const double cutoff = 1e-10 * largest;

    std::vector<std::size_t> col_of(m); // column permutation from pivoting
    for (std::size_t k = 0; k < m; ++k) col_of[k] = k;

    std::size_t rank = 0;
    for (std::size_t step = 0; step < m; ++step) {
        // Complete pivot over the remaining submatrix.
        double best = 0.0;
        std::size_t pr = step, pc = step;
        for (std::size_t i = step; i < m; ++i)
            for (std::size_t j = step; j < m; ++j)
                if (std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pr = i;
                    pc = j;
                }
        if (best <= cutoff) break;
        if (pr != step)
            for (std::size_t j = 0; j < m; ++j) std::swap(a(step, j), a(pr, j));
        if (pc != step) {
            for (std::size_t i = 0; i < m; ++i) std::swap(a(i, step), a(i, pc));
            std::swap(col_of[step], col_of[pc]);
        }
        for (std::size_t i = step + 1; i < m; ++i) {
            const double factor = a(i, step) / a(step, step);
            a(i, step) = 0.0;
            for (std::size_t j = step + 1; j < m; ++j) a(i, j) -= factor * a(step, j);
        }
        ++rank;
    }

    std::vector<std::vector<double>> basis;
    for (std::size_t free_col = rank; free_col < m; ++free_col) {
        std::vector<double> y(m, 0.0); // solution in permuted coordinates
        y[free_col] = 1.0;
        for (std::size_t k = rank; k-- > 0;) {
            double acc = 0.0;
            for (std::size_t j = k + 1; j < m; ++j) acc += a(k, j) * y[j];
            y[k] = -acc / a(k, k);
        }
        std::vector<double> x(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) x[col_of[k]] = y[k];
        basis.push_back(std::move(x));
    }
    return basis;
}

/// Exhaustive check of the subset compatibility condition: for every pair
/// (I, J) with A_{I^c J^c} = 0, sum of c over I^c must not exceed sum of d
/// over J, strictly whenever A_IJ is nonzero. N + M <= 12.
inline SubsetCompatibilityResult subset_compatibility_oracle(const Matrix& a,
                                                             const std::vector<double>& c,
                                                             const std::vector<double>& d) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    if (n + m > 12) throw TooLargeError("subset_compatibility_oracle: N + M must be at most 12");
    if (c.size() != n || d.size() != m)
        throw Error("subset_compatibility_oracle: vector lengths do not match");

    double sum_c = 0.0;
    for (double x : c) sum_c += x;
    const double slack_tol = 1e-9 * sum_c;
    const double tight_tol = 1e-10 * sum_c;

    SubsetCompatibilityResult res;
    res.compatible = true;
    res.strict = true;

    // row_mask enumerates I^c directly; col_mask enumerates J.
    for (std::size_t row_mask = 0; row_mask < (std::size_t(1) << n); ++row_mask) {
        for (std::size_t col_mask = 0; col_mask < (std::size_t(1) << m); ++col_mask) {
            bool zero_block = true;
            for (std::size_t i = 0; i < n && zero_block; ++i)
                if (row_mask >> i & 1)
                    for (std::size_t j = 0; j < m; ++j)
                        if (!(col_mask >> j & 1) && a(i, j) > 0.0) {
                            zero_block = false;
                            break;
                        }
            if (!zero_block) continue;

            double lhs = 0.0, rhs = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (row_mask >> i & 1) lhs += c[i];
            for (std::size_t j = 0; j < m; ++j)
                if (col_mask >> j & 1) rhs += d[j];

            if (lhs > rhs + slack_tol) {
                res.compatible = false;
                continue;
            }
            if (std::abs(lhs - rhs) <= tight_tol) {
                SubsetCompatibilityResult::TightPair pair;
                for (std::size_t i = 0; i < n; ++i)
                    if (row_mask >> i & 1) pair.rows.push_back(i);
                for (std::size_t j = 0; j < m; ++j)
                    if (col_mask >> j & 1) pair.cols.push_back(j);
                for (std::size_t i = 0; i < n; ++i)
                    if (!(row_mask >> i & 1))
                        for (std::size_t j = 0; j < m; ++j)
                            if ((col_mask >> j & 1) && a(i, j) > 0.0)
                                pair.opposing_block_nonzero = true;
                if (pair.opposing_block_nonzero) res.strict = false;
                res.tight_pairs.push_back(std::move(pair));
            }
        }
    }
    if (!res.compatible) res.strict = false;
    return res;
}

/// Definitional connectedness: every proper nonempty country subset shares
/// at least one commodity with its complement. M <= 12.
inline bool connectedness_oracle(const Matrix& q) {
    const std::size_t n = q.rows();
    const std::size_t m = q.cols();
    if (m > 12) throw TooLargeError("connectedness_oracle: M must be at most 12");
    for (std::size_t mask = 1; mask + 1 < (std::size_t(1) << m); ++mask) {
        bool bridged = false;
        for (std::size_t i = 0; i < n && !bridged; ++i) {
            bool inside = false, outside = false;
            for (std::size_t j = 0; j < m; ++j) {
                if (q(i, j) <= 0.0) continue;
                if (mask >> j & 1)
                    inside = true;
                else
                    outside = true;
            }
            bridged = inside && outside;
        }
        if (!bridged) return false;
    }
    return true;
}

/// Runs the main solver and the matching oracle on a small instance and
/// reports the worst relative deviation after common normalization.
inline OracleVerdict cross_validate(const Dataset& d, const MethodSpec& spec) {
    if (d.n_commodities > 6 || d.n_countries > 6)
        throw TooLargeError("cross_validate: needs N <= 6 and M <= 6");

    OracleVerdict verdict;
    // The geometric member of the GK family is solved in the log domain, so
    // the F-nullspace comparison does not apply; fall through to the
    // probe-and-residual route shared with the nonlinear systems.
    const bool log_domain_linear = spec.method == Method::GK_MEAN && spec.rho == 0.0;
    if (is_linear_method(spec.method) && !log_domain_linear) {
        const LinearWeights w = build_cd(d, spec);
        const Matrix f = build_F(w);
        const std::vector<std::vector<double>> basis = nullspace_oracle(f);

        Solution sol;
        try {
            sol = solve_linear(d, spec);
        } catch (const DisconnectedError&) {
            verdict.agrees = basis.size() >= 2;
            verdict.detail = "solver refused a disconnected dataset; eigenspace dimension " +
                             std::to_string(basis.size());
            return verdict;
        }

        if (basis.size() != 1) {
            verdict.agrees = false;
            verdict.detail = "eigenspace dimension " + std::to_string(basis.size()) +
                             " for a solved dataset";
            return verdict;
        }
        // Recover ppp from the oracle eigenvector and compare.
        std::vector<double> x = basis.front();
        double orient = 0.0;
        for (double v : x) orient += v;
        if (orient < 0.0)
            for (double& v : x) v = -v;
        const std::vector<double> col_c = w.c.col_sums();
        Solution oracle_sol;
        oracle_sol.ppp.resize(d.n_countries);
        for (std::size_t j = 0; j < d.n_countries; ++j)
            oracle_sol.ppp[j] = std::exp(-std::log(x[j] / col_c[j]) / w.rho);
        oracle_sol.p_int.assign(d.n_commodities, 1.0);
        oracle_sol = normalize_solution(std::move(oracle_sol), Normalization::GEOMEAN_ONE);
        const Solution main_sol = normalize_solution(sol, Normalization::GEOMEAN_ONE);

        for (std::size_t j = 0; j < d.n_countries; ++j)
            verdict.max_rel_dev =
                std::max(verdict.max_rel_dev, std::abs(main_sol.ppp[j] - oracle_sol.ppp[j]) /
                                                  oracle_sol.ppp[j]);
        verdict.agrees = verdict.max_rel_dev <= 1e-8;
        verdict.detail = "nullspace comparison";
        return verdict;
    }

    if (is_share_method(spec.method) || log_domain_linear) {
        try {
            const Solution sol = solve(d, spec);
            const UniquenessProbe probe = uniqueness_probe(d, spec, 8);
            verdict.max_rel_dev = std::max(sol.residual_norm, probe.spread);
            verdict.agrees = sol.residual_norm <= 1e-8 && probe.unique;
            verdict.detail = "8-start probe and residual";
        } catch (const DisconnectedError&) {
            const UniquenessProbe probe = uniqueness_probe(d, spec, 8);
            verdict.agrees = !probe.unique;
            verdict.max_rel_dev = probe.spread;
            verdict.detail = "solver refused a disconnected dataset; probe spread " +
                             std::to_string(probe.spread);
        }
        return verdict;
    }

    throw UnsupportedMethodError("cross_validate: supported for the linear and share families");
}

} // namespace multindex
