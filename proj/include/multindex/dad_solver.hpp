#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "multindex/connectivity.hpp"
#include "multindex/dataset.hpp"
#include "multindex/errors.hpp"
#include "multindex/linear_solver.hpp"
#include "multindex/loglinear.hpp"
#include "multindex/matrix.hpp"
#include "multindex/method.hpp"
#include "multindex/residual.hpp"
#include "multindex/solution.hpp"

namespace multindex {

/// Weight triplet of the diagonally-scaled fixed-point problem
/// x = A'(c / A(d/x)). Support of A equals the support of q.
struct DadTriplet {
    Matrix a;              // a_ij = w*_ij p_ij^rho
    std::vector<double> c; // c_i  = sum_j w_ij
    std::vector<double> d; // d_j  = sum_i w_ij = 1
    double rho = 0.0;
};

struct DadFixedPointResult {
    std::vector<double> x; // positive, normalized to sum 1
    int iterations = 0;
    double residual = 0.0; // sup relative defect of the displayed equation
    double lambda = 1.0;   // geometric mean of map(x)/x at the final iterate
    std::vector<double> delta_history; // per-iteration relative sup change
};

struct UniquenessProbe {
    bool unique = false;
    double spread = 0.0;
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultProbeSeed = 20240915;

/// Share-weighted triplet for RAO (rho 0), IDB (rho -1), ARITH (rho 1) and
/// GEN_MEAN (rho free): a_ij = w*_ij p_ij^rho, c_i = sum_j w_ij, d_j = 1.
inline DadTriplet build_dad(const Dataset& d, const MethodSpec& spec) {
    if (!is_share_method(spec.method))
        throw UnsupportedMethodError("build_dad: " + method_name(spec.method) +
                                     " is not a share-weighted method");
    const double rho = share_rho(spec);
    const SharesView shares = expenditure_shares(d);
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;

    DadTriplet t;
    t.rho = rho;
    t.a = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            t.a(i, j) = shares.w_star(i, j) == 0.0
                            ? 0.0
                            : shares.w_star(i, j) * std::pow(d.prices(i, j), rho);
    t.c = shares.w.row_sums();
    t.d = shares.w.col_sums();
    return t;
}

/// Alternating (Sinkhorn-style) substitution for the DAD fixed point:
///   y_i <- c_i / sum_m a_im d_m / x_m,   x_j <- sum_n a_nj y_n,
/// iterated on sum-one normalized x until the entrywise relative change
/// drops below tol. Compatibility of the triplet is verified up front and
/// surfaced, not silently iterated over.
inline DadFixedPointResult dad_fixed_point(const DadTriplet& t, std::vector<double> x,
                                           double tol, int max_iter) {
    const std::size_t n = t.a.rows();
    const std::size_t m = t.a.cols();
    if (x.size() != m) throw Error("dad_fixed_point: start vector has wrong length");
    for (double v : x)
        if (!(v > 0.0)) throw Error("dad_fixed_point: start vector must be positive");

    CompatibilityReport compat = compatibility_check(t.a, t.c, t.d);
    if (!compat.compatible) throw IncompatibleTripletError(std::move(compat));

    auto normalize = [&](std::vector<double>& v) {
        double sum = 0.0;
        for (double e : v) sum += e;
        for (double& e : v) e /= sum;
    };
    normalize(x);

    std::vector<double> y(n), next(m);
    auto apply_map = [&](const std::vector<double>& from) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                if (t.a(i, j) > 0.0) acc += t.a(i, j) * t.d[j] / from[j];
            y[i] = t.c[i] / acc;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (t.a(i, j) > 0.0) acc += t.a(i, j) * y[i];
            next[j] = acc;
        }
    };

    std::vector<double> delta_history;
    double delta = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        apply_map(x);
        normalize(next);
        delta = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            delta = std::max(delta, std::abs(next[j] - x[j]) / next[j]);
        x.swap(next);
        delta_history.push_back(delta);
        if (delta < tol) break;
    }
    if (delta >= tol)
        throw NoConvergenceError(max_iter, delta,
                                 "DAD fixed-point iteration did not converge in " +
                                     std::to_string(max_iter) + " iterations");

    DadFixedPointResult res;
    apply_map(x);
    res.residual = 0.0;
    double log_ratio = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        res.residual = std::max(res.residual, std::abs(next[j] - x[j]) / x[j]);
        log_ratio += std::log(next[j] / x[j]);
    }
    res.lambda = std::exp(log_ratio / static_cast<double>(m));
    res.x = std::move(x);
    res.iterations = it + 1;
    res.delta_history = std::move(delta_history);
    return res;
}

namespace detail {

/// RAO is the rho = 0 member of the share family: the system is linear in
/// logs and is solved exactly there instead of as a small-rho limit.
inline Solution solve_rao_log(const Dataset& d, const MethodSpec& spec,
                              const std::vector<double>* u0 = nullptr) {
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;
    const SharesView shares = expenditure_shares(d);
    Matrix log_p(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) log_p(i, j) = std::log(d.prices(i, j));

    const LogLinearResult r = solve_log_linear(shares.w, shares.w_star, log_p,
                                               effective_tol(spec), effective_max_iter(spec), u0);
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

/// Shared by solve_share_system and the uniqueness probe: solve without the
/// connectivity refusal, from a caller-chosen start.
inline Solution solve_share_from_start(const Dataset& d, const MethodSpec& spec,
                                       const std::vector<double>& x0) {
    const double rho = share_rho(spec);
    if (rho == 0.0) {
        std::vector<double> u0(x0.size());
        for (std::size_t j = 0; j < x0.size(); ++j) u0[j] = std::log(x0[j]);
        return solve_rao_log(d, spec, &u0);
    }

    const DadTriplet t = build_dad(d, spec);
    // The fixed-point coordinate is ppp^rho, so an entrywise change of
    // delta in x moves ppp by about delta/|rho|: for small |rho| the
    // tolerance must shrink with rho (floored near machine noise).
    const double tol_x =
        std::max(effective_tol(spec) * std::min(1.0, std::abs(rho)), 1e-15);
    const DadFixedPointResult fp = dad_fixed_point(t, x0, tol_x, effective_max_iter(spec));

    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;
    const SharesView shares = expenditure_shares(d);

    Solution sol;
    sol.ppp.resize(m);
    // Pick the geometric-mean-one representative of the fixed-point ray
    // before applying the 1/rho power; other scales underflow for tiny rho.
    double log_center = 0.0;
    for (double v : fp.x) log_center += std::log(v);
    log_center /= static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j)
        sol.ppp[j] = std::exp((std::log(fp.x[j]) - log_center) / rho);
    // International prices from the price-block equation at the solved ppp.
    sol.p_int.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (shares.w_star(i, j) > 0.0)
                acc += shares.w_star(i, j) *
                       std::exp(rho * (std::log(d.prices(i, j)) - std::log(sol.ppp[j])));
        sol.p_int[i] = std::exp(std::log(acc) / rho);
    }
    sol.iterations = fp.iterations;
    sol.lambda_estimate = fp.lambda;
    sol = normalize_solution(std::move(sol), spec.normalization);
    sol.residual_norm = residual(d, spec, sol);
    return sol;
}

} // namespace detail

/// Full pipeline for RAO / IDB / ARITH / GEN_MEAN: connectivity precheck,
/// triplet construction, DAD fixed point (or exact log solve at rho = 0),
/// recovery of ppp and international prices.
inline Solution solve_share_system(const Dataset& d, const MethodSpec& spec) {
    if (!is_share_method(spec.method))
        throw UnsupportedMethodError("solve_share_system: " + method_name(spec.method) +
                                     " is not a share-weighted method");
    validate_method_spec(spec);

    ConnectivityReport conn = is_connected(d.quantities);
    if (!conn.connected) throw DisconnectedError(std::move(conn));

    if (share_rho(spec) == 0.0) {
        // The compatibility precondition applies to the rho = 0 triplet too.
        const DadTriplet t = build_dad(d, spec);
        CompatibilityReport compat = compatibility_check(t.a, t.c, t.d);
        if (!compat.compatible) throw IncompatibleTripletError(std::move(compat));
        return detail::solve_rao_log(d, spec);
    }
    return detail::solve_share_from_start(d, spec,
                                          std::vector<double>(d.n_countries, 1.0));
}

/// Empirical uniqueness check: solve from k random positive starts
/// (log-uniform in [1e-2, 1e2]), normalize each solution to geometric mean
/// one and report the largest pairwise relative sup-distance. Runs without
/// the connectivity refusal so that disconnected inputs reveal their free
/// scale factors. Supports the linear and share families.
inline UniquenessProbe uniqueness_probe(const Dataset& d, const MethodSpec& spec,
                                        int k_starts,
                                        std::uint64_t seed = kDefaultProbeSeed) {
    if (k_starts < 2) throw Error("uniqueness_probe: need at least two starts");
    if (!is_linear_method(spec.method) && !is_share_method(spec.method))
        throw UnsupportedMethodError(
            "uniqueness_probe: supported for the linear and share families only");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_range(std::log(1e-2), std::log(1e2));
    auto random_start = [&](std::size_t len) {
        std::vector<double> v(len);
        for (double& x : v) x = std::exp(log_range(rng));
        return v;
    };

    std::vector<std::vector<double>> solutions;
    for (int k = 0; k < k_starts; ++k) {
        const std::vector<double> x0 = random_start(d.n_countries);
        Solution sol;
        if (is_share_method(spec.method)) {
            sol = detail::solve_share_from_start(d, spec, x0);
        } else if (spec.method == Method::GK_MEAN && spec.rho == 0.0) {
            std::vector<double> u0(x0.size());
            for (std::size_t j = 0; j < x0.size(); ++j) u0[j] = std::log(x0[j]);
            sol = detail::solve_geometric_gk(d, spec, &u0);
        } else {
            const LinearWeights w = build_cd(d, spec);
            const Matrix f = build_F(w);
            EigenResult e;
            try {
                e = solve_eigen(f, effective_tol(spec), effective_max_iter(spec), false, &x0);
            } catch (const NoConvergenceError&) {
                e = solve_eigen(f, effective_tol(spec), effective_max_iter(spec), true, &x0);
            }
            Solution raw;
            raw.ppp.resize(d.n_countries);
            const std::vector<double> col_c = w.c.col_sums();
            for (std::size_t j = 0; j < d.n_countries; ++j) {
                const double fj = e.x[j] / col_c[j];
                raw.ppp[j] = std::exp(-std::log(fj) / w.rho);
            }
            raw.p_int.assign(d.n_commodities, 1.0);
            sol = std::move(raw);
        }
        sol = normalize_solution(std::move(sol), Normalization::GEOMEAN_ONE);
        solutions.push_back(sol.ppp);
    }

    UniquenessProbe probe;
    probe.seed = seed;
    for (std::size_t a = 0; a < solutions.size(); ++a)
        for (std::size_t b = a + 1; b < solutions.size(); ++b)
            for (std::size_t j = 0; j < d.n_countries; ++j) {
                const double hi = std::max(solutions[a][j], solutions[b][j]);
                probe.spread = std::max(
                    probe.spread, std::abs(solutions[a][j] - solutions[b][j]) / hi);
            }
    probe.unique = probe.spread <= 1e-6;
    return probe;
}

} // namespace multindex
