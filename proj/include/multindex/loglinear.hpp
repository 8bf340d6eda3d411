#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"

namespace multindex {

/// Solution of the geometric-mean (log-domain) system, see solve_log_linear.
struct LogLinearResult {
    std::vector<double> log_ppp; // length M, mean zero
    std::vector<double> log_p_int;
    int iterations = 0;
    double drift = 0.0; // residual uniform shift of the affine map at the fix point
};

/// Solves the log-linear system
///
///   u_j = sum_n S_nj (log p_nj - v_n),   v_i = sum_m T_im (log p_im - u_m),
///
/// where columns of S sum to 1 and rows of T sum to 1. Substituting v gives
/// the affine fixed point u = a + K u with the row-stochastic matrix
/// K = S'T, solved by fixed-point iteration; K has a positive diagonal, so
/// the iteration cannot oscillate. The solution is unique up to an additive
/// constant exactly when K is irreducible; iterates are recentered to mean
/// zero each step.
inline LogLinearResult solve_log_linear(const Matrix& s, const Matrix& t, const Matrix& log_p,
                                        double tol, int max_iter,
                                        const std::vector<double>* u0 = nullptr) {
    const std::size_t n = s.rows();
    const std::size_t m = s.cols();
    if (t.rows() != n || t.cols() != m || log_p.rows() != n || log_p.cols() != m)
        throw Error("solve_log_linear: dimension mismatch");

    // b_n = sum_m T_nm log p_nm;  a_j = sum_n S_nj (log p_nj - b_n)
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) b[i] += t(i, j) * log_p(i, j);
    std::vector<double> a(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) a[j] += s(i, j) * (log_p(i, j) - b[i]);

    std::vector<double> u(m, 0.0);
    if (u0) {
        if (u0->size() != m) throw Error("solve_log_linear: start vector has wrong length");
        u = *u0;
    }
    auto recenter = [](std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        for (double& x : v) x -= mean;
    };
    recenter(u);

    std::vector<double> tu(n), next(m);
    double delta = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        // (K u)_j = sum_n S_nj sum_m T_nm u_m, without forming K.
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += t(i, j) * u[j];
            tu[i] = acc;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double acc = a[j];
            for (std::size_t i = 0; i < n; ++i) acc += s(i, j) * tu[i];
            next[j] = acc;
        }
        recenter(next);
        delta = 0.0;
        for (std::size_t j = 0; j < m; ++j) delta = std::max(delta, std::abs(next[j] - u[j]));
        u.swap(next);
        if (delta < tol) break;
    }
    if (delta >= tol)
        throw NoConvergenceError(max_iter, delta,
                                 "log-domain iteration did not converge in " +
                                     std::to_string(max_iter) + " iterations");

    // Uniform drift of the un-centered map measures system consistency: the
    // affine map adds drift * 1 per application on the solution ray.
    double drift = 0.0;
    {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += t(i, j) * u[j];
            tu[i] = acc;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double acc = a[j];
            for (std::size_t i = 0; i < n; ++i) acc += s(i, j) * tu[i];
            drift += acc - u[j];
        }
        drift /= static_cast<double>(m);
    }

    LogLinearResult res;
    res.log_ppp = u;
    res.log_p_int.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += t(i, j) * (log_p(i, j) - u[j]);
        res.log_p_int[i] = acc;
    }
    res.iterations = it + 1;
    res.drift = drift;
    return res;
}

} // namespace multindex
