#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "multindex/dataset.hpp"
#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"
#include "multindex/method.hpp"

namespace multindex {

/// Cost-minimizing quantities q*_ij for reaching each country's observed
/// utility level at international prices P. Homogeneous of degree zero in P.
struct DemandEvaluation {
    Matrix q_star;
};

namespace detail {

inline void require_positive_quantities(const Dataset& d, const char* family) {
    for (std::size_t i = 0; i < d.n_commodities; ++i)
        for (std::size_t j = 0; j < d.n_countries; ++j)
            if (!(d.quantities(i, j) > 0.0))
                throw ZeroQuantityError(i + 1, j + 1,
                                        std::string(family) +
                                            " demand is undefined with a zero quantity "
                                            "(commodity " +
                                            std::to_string(i + 1) + ", country " +
                                            std::to_string(j + 1) + ")");
}

} // namespace detail

/// Utility of an arbitrary strictly positive bundle. Leontief preferences
/// are calibrated per country and have no bundle-free utility, so only the
/// interior families are accepted here.
inline double bundle_utility(const PreferenceSpec& pref, const std::vector<double>& x) {
    switch (pref.family) {
        case PreferenceFamily::COBB_DOUGLAS: {
            double log_u = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                log_u += pref.share_params[i] * std::log(x[i]);
            return std::exp(log_u);
        }
        case PreferenceFamily::CES: {
            const double r = (pref.sigma - 1.0) / pref.sigma;
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                acc += pref.share_params[i] * std::pow(x[i], r);
            return std::pow(acc, 1.0 / r);
        }
        case PreferenceFamily::LEONTIEF:
            throw Error("bundle_utility: Leontief preferences are calibrated per country");
    }
    return 0.0;
}

/// Utility level country j attains with its observed bundle.
inline double utility_level(const PreferenceSpec& pref, const Dataset& d, std::size_t j) {
    if (pref.family == PreferenceFamily::LEONTIEF) return 1.0;
    std::vector<double> bundle(d.n_commodities);
    for (std::size_t i = 0; i < d.n_commodities; ++i) bundle[i] = d.quantities(i, j);
    return bundle_utility(pref, bundle);
}

/// Closed-form Hicksian (expenditure-minimizing) demand per country.
///
///   LEONTIEF      q* = q exactly, for any P.
///   COBB_DOUGLAS  q*_nj = u_j (a_n / P_n) prod_k (P_k / a_k)^{a_k}
///   CES           q*_nj = u_j (a_n / P_n)^sigma (sum_k a_k^sigma P_k^{1-sigma})^{sigma/(1-sigma)}
///
/// The interior families require strictly positive quantities.
inline DemandEvaluation hicksian_demand(const std::vector<double>& p_int, const Dataset& d,
                                        const PreferenceSpec& pref) {
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;
    if (p_int.size() != n) throw Error("hicksian_demand: price vector has wrong length");
    for (double p : p_int)
        if (!(p > 0.0)) throw Error("hicksian_demand: prices must be strictly positive");

    Matrix q_star(n, m);
    switch (pref.family) {
        case PreferenceFamily::LEONTIEF:
            q_star = d.quantities;
            break;

        case PreferenceFamily::COBB_DOUGLAS: {
            detail::require_positive_quantities(d, "Cobb-Douglas");
            if (pref.share_params.size() != n)
                throw Error("hicksian_demand: share parameters have wrong length");
            // Unit expenditure factor prod_k (P_k/a_k)^{a_k}, computed in logs.
            double log_e = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                log_e += pref.share_params[k] * std::log(p_int[k] / pref.share_params[k]);
            const double e1 = std::exp(log_e);
            for (std::size_t j = 0; j < m; ++j) {
                const double u = utility_level(pref, d, j);
                for (std::size_t i = 0; i < n; ++i)
                    q_star(i, j) = u * pref.share_params[i] / p_int[i] * e1;
            }
            break;
        }

        case PreferenceFamily::CES: {
            detail::require_positive_quantities(d, "CES");
            if (pref.share_params.size() != n)
                throw Error("hicksian_demand: share parameters have wrong length");
            const double sigma = pref.sigma;
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += std::pow(pref.share_params[k], sigma) * std::pow(p_int[k], 1.0 - sigma);
            const double t = std::pow(s, sigma / (1.0 - sigma));
            for (std::size_t j = 0; j < m; ++j) {
                const double u = utility_level(pref, d, j);
                for (std::size_t i = 0; i < n; ++i)
                    q_star(i, j) = u * std::pow(pref.share_params[i] / p_int[i], sigma) * t;
            }
            break;
        }
    }
    return DemandEvaluation{std::move(q_star)};
}

} // namespace multindex
