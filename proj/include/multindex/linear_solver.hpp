#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "multindex/connectivity.hpp"
#include "multindex/dataset.hpp"
#include "multindex/errors.hpp"
#include "multindex/loglinear.hpp"
#include "multindex/matrix.hpp"
#include "multindex/method.hpp"
#include "multindex/residual.hpp"
#include "multindex/solution.hpp"

namespace multindex {

/// Weight pair (c, d) of a linear system together with the order of the
/// power transforms: f(x) = x^{-rho} applied to ppp, g(x) = x^{rho} applied
/// to international prices. Support of c and d equals the support of q.
struct LinearWeights {
    Matrix c;
    Matrix d;
    double rho = 1.0;
};

/// Positive eigenvector result of the stochastic eigenproblem A x = lambda x.
struct EigenResult {
    std::vector<double> x;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    bool unique = true; // companion irreducibility check on the support of A
};

/// Builds the weight matrices of the linear family.
///
///   GK       c = p.q            d = q             rho = 1
///   GGK      c = beta_j p.q     d = beta_j q      rho = 1
///   GK_MEAN  c = beta_j p^rho q d = beta_j q      rho as given
///   EWGK     c = w              d = w / p         rho = 1
inline LinearWeights build_cd(const Dataset& d, const MethodSpec& spec) {
    if (!is_linear_method(spec.method))
        throw UnsupportedMethodError("build_cd: " + method_name(spec.method) +
                                     " is not a linear-family method");
    validate_method_spec(spec);
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;

    LinearWeights w;
    w.c = Matrix(n, m);
    w.d = Matrix(n, m);
    w.rho = 1.0;

    switch (spec.method) {
        case Method::GK:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    w.c(i, j) = d.prices(i, j) * d.quantities(i, j);
                    w.d(i, j) = d.quantities(i, j);
                }
            break;
        case Method::GGK:
        case Method::GK_MEAN: {
            if (spec.beta.size() != m) throw Error("build_cd: beta has wrong length");
            const double rho = spec.method == Method::GK_MEAN ? spec.rho : 1.0;
            w.rho = rho;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    const double price_part =
                        rho == 1.0 ? d.prices(i, j) : std::pow(d.prices(i, j), rho);
                    w.c(i, j) = spec.beta[j] * price_part * d.quantities(i, j);
                    w.d(i, j) = spec.beta[j] * d.quantities(i, j);
                }
            break;
        }
        case Method::EWGK: {
            const SharesView shares = expenditure_shares(d);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    w.c(i, j) = shares.w(i, j);
                    w.d(i, j) = shares.w(i, j) / d.prices(i, j);
                }
            break;
        }
        default: break;
    }
    return w;
}

/// F_kj = sum_n (d_nk c_nj / sum_m d_nm) / sum_n c_nj. Every column of F
/// sums to one, so F' is stochastic and the dominant eigenvalue is 1.
inline Matrix build_F(const LinearWeights& w) {
    const std::size_t n = w.c.rows();
    const std::size_t m = w.c.cols();
    const std::vector<double> row_d = w.d.row_sums();
    const std::vector<double> col_c = w.c.col_sums();
    Matrix f(m, m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const double left = w.d(i, k) / row_d[i];
            if (left == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) f(k, j) += left * w.c(i, j) / col_c[j];
        }
    }
    return f;
}

/// Stacked (N+M)x(N+M) form B = [[0, C], [D, 0]] with C column-normalized by
/// the column sums of c and D row-normalized by the row sums of d.
inline Matrix build_B(const LinearWeights& w) {
    const std::size_t n = w.c.rows();
    const std::size_t m = w.c.cols();
    const std::vector<double> row_d = w.d.row_sums();
    const std::vector<double> col_c = w.c.col_sums();
    Matrix b(n + m, n + m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            b(i, n + j) = w.c(i, j) / col_c[j];
            b(n + j, i) = w.d(i, j) / row_d[i];
        }
    return b;
}

/// Power iteration for the dominant eigenpair of a column-stochastic
/// non-negative matrix; lambda is 1 at convergence. If the raw iteration
/// oscillates (periodic support), rerun with shifted = true, which iterates
/// (A + I)/2 and preserves the eigenvector.
inline EigenResult solve_eigen(const Matrix& a, double tol, int max_iter, bool shifted = false,
                               const std::vector<double>* x0 = nullptr) {
    const std::size_t m = a.rows();
    if (a.cols() != m) throw Error("solve_eigen: matrix must be square");
    for (double s : a.col_sums())
        if (std::abs(s - 1.0) > 1e-9)
            throw Error("solve_eigen: columns must sum to one");

    std::vector<double> x(m, 1.0 / static_cast<double>(m));
    if (x0) {
        if (x0->size() != m) throw Error("solve_eigen: start vector has wrong length");
        x = *x0;
        double sum = 0.0;
        for (double v : x) {
            if (!(v > 0.0)) throw Error("solve_eigen: start vector must be positive");
            sum += v;
        }
        for (double& v : x) v /= sum;
    }

    double delta = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        std::vector<double> y = mat_vec(a, x);
        if (shifted)
            for (std::size_t j = 0; j < m; ++j) y[j] = 0.5 * (y[j] + x[j]);
        double sum = 0.0, peak = 0.0;
        for (double v : y) sum += v;
        for (double& v : y) {
            v /= sum;
            peak = std::max(peak, v);
        }
        delta = 0.0;
        for (std::size_t j = 0; j < m; ++j) delta = std::max(delta, std::abs(y[j] - x[j]));
        delta /= peak;
        x.swap(y);
        if (delta < tol) break;
    }
    if (delta >= tol)
        throw NoConvergenceError(
            max_iter, delta,
            "power iteration did not converge in " + std::to_string(max_iter) +
                " iterations (near-reducible or periodic structure)");

    EigenResult res;
    res.x = x;
    res.iterations = it + 1;
    res.converged = true;
    // Rayleigh quotient against the unshifted matrix.
    const std::vector<double> ax = mat_vec(a, x);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        num += x[j] * ax[j];
        den += x[j] * x[j];
    }
    res.lambda = num / den;
    res.unique = is_irreducible(a);
    return res;
}

/// Maps the eigenvector back to (ppp, p_int): f_j = x_j / sum_n c_nj,
/// ppp_j = f_j^{-1/rho}, g_i = sum_m (c_im / sum_m d_im) f_m,
/// p_int_i = g_i^{1/rho}.
inline Solution recover_solution(const LinearWeights& w, const EigenResult& e,
                                 const Dataset& d, const MethodSpec& spec) {
    const std::size_t n = w.c.rows();
    const std::size_t m = w.c.cols();
    const std::vector<double> row_d = w.d.row_sums();
    const std::vector<double> col_c = w.c.col_sums();

    std::vector<double> f(m);
    for (std::size_t j = 0; j < m; ++j) {
        f[j] = e.x[j] / col_c[j];
        if (!(f[j] > 0.0))
            throw TransformDomainError("recover_solution: non-positive transform value");
    }

    Solution sol;
    sol.ppp.resize(m);
    for (std::size_t j = 0; j < m; ++j) sol.ppp[j] = std::exp(-std::log(f[j]) / w.rho);

    sol.p_int.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double g = 0.0;
        for (std::size_t j = 0; j < m; ++j) g += w.c(i, j) / row_d[i] * f[j];
        sol.p_int[i] = std::exp(std::log(g) / w.rho);
    }

    sol.iterations = e.iterations;
    sol.lambda_estimate = e.lambda;
    sol = normalize_solution(std::move(sol), spec.normalization);
    sol.residual_norm = residual(d, spec, sol);
    return sol;
}

namespace detail {

/// Geometric GK (the rho -> 0 limit of the generalized-mean GK family):
/// quantity-share weights in the ppp block, beta-weighted quantity shares in
/// the price block, solved exactly in the log domain.
inline Solution solve_geometric_gk(const Dataset& d, const MethodSpec& spec,
                                   const std::vector<double>* u0 = nullptr) {
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;
    Matrix s(n, m), t(n, m), log_p(n, m);
    const std::vector<double> col_q = d.quantities.col_sums();
    std::vector<double> row_bq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) row_bq[i] += spec.beta[j] * d.quantities(i, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            s(i, j) = d.quantities(i, j) / col_q[j];
            t(i, j) = spec.beta[j] * d.quantities(i, j) / row_bq[i];
            log_p(i, j) = std::log(d.prices(i, j));
        }
    const LogLinearResult r =
        solve_log_linear(s, t, log_p, effective_tol(spec), effective_max_iter(spec), u0);

    Solution sol;
    sol.ppp.resize(m);
    sol.p_int.resize(n);
    for (std::size_t j = 0; j < m; ++j) sol.ppp[j] = std::exp(r.log_ppp[j]);
    for (std::size_t i = 0; i < n; ++i) sol.p_int[i] = std::exp(r.log_p_int[i]);
    sol.iterations = r.iterations;
    sol.lambda_estimate = std::exp(r.drift);
    sol = normalize_solution(std::move(sol), spec.normalization);
    sol.residual_norm = residual(d, spec, sol);
    return sol;
}

} // namespace detail

/// Full pipeline for GK / GGK / EWGK / GK_MEAN: connectivity precheck,
/// weight construction, stochastic eigenproblem, recovery. Refuses to solve
/// a disconnected dataset and reports the offending split instead.
inline Solution solve_linear(const Dataset& d, const MethodSpec& spec) {
    if (!is_linear_method(spec.method))
        throw UnsupportedMethodError("solve_linear: " + method_name(spec.method) +
                                     " is not a linear-family method");
    validate_method_spec(spec);
    if ((spec.method == Method::GGK || spec.method == Method::GK_MEAN) &&
        spec.beta.size() != d.n_countries)
        throw Error("solve_linear: beta has wrong length");

    ConnectivityReport conn = is_connected(d.quantities);
    if (!conn.connected) throw DisconnectedError(std::move(conn));

    // The power transforms degenerate at rho = 0; that limit is the
    // geometric system, solved exactly in the log domain.
    if (spec.method == Method::GK_MEAN && spec.rho == 0.0)
        return detail::solve_geometric_gk(d, spec);

    const LinearWeights w = build_cd(d, spec);
    const Matrix f = build_F(w);
    EigenResult e;
    try {
        e = solve_eigen(f, effective_tol(spec), effective_max_iter(spec));
    } catch (const NoConvergenceError&) {
        e = solve_eigen(f, effective_tol(spec), effective_max_iter(spec), /*shifted=*/true);
    }
    return recover_solution(w, e, d, spec);
}

} // namespace multindex
