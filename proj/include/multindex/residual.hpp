#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "multindex/dataset.hpp"
#include "multindex/demand.hpp"
#include "multindex/errors.hpp"
#include "multindex/method.hpp"
#include "multindex/solution.hpp"

namespace multindex {

namespace detail {

inline double rel_dev(double lhs, double rhs) { return std::abs(lhs - rhs) / std::abs(rhs); }

} // namespace detail

/// Plugs a candidate solution into the defining equations of the chosen
/// system and returns the maximum relative deviation |LHS - RHS| / |RHS|
/// over all M + N equations. Zero iff the candidate solves the system
/// exactly; invariant under the common rescaling (g ppp, p_int / g).
inline double residual(const Dataset& d, const MethodSpec& spec, const Solution& s) {
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;
    if (s.ppp.size() != m || s.p_int.size() != n)
        throw Error("residual: solution dimensions do not match the dataset");
    for (double x : s.ppp)
        if (!(x > 0.0)) throw Error("residual: ppp must be strictly positive");
    for (double x : s.p_int)
        if (!(x > 0.0)) throw Error("residual: p_int must be strictly positive");

    const SharesView shares = expenditure_shares(d);
    const Matrix& p = d.prices;
    const Matrix& q = d.quantities;
    const std::vector<double>& ppp = s.ppp;
    const std::vector<double>& pint = s.p_int;
    double worst = 0.0;
    auto note = [&](double lhs, double rhs) { worst = std::max(worst, detail::rel_dev(lhs, rhs)); };

    switch (spec.method) {
        case Method::GK:
        case Method::GGK: {
            std::vector<double> beta(m, 1.0);
            if (spec.method == Method::GGK) {
                if (spec.beta.size() != m) throw Error("residual: beta has wrong length");
                beta = spec.beta;
            }
            for (std::size_t j = 0; j < m; ++j) {
                double rhs = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (q(i, j) > 0.0) rhs += shares.w(i, j) * pint[i] / p(i, j);
                note(1.0 / ppp[j], rhs);
            }
            for (std::size_t i = 0; i < n; ++i) {
                double denom = 0.0, rhs = 0.0;
                for (std::size_t j = 0; j < m; ++j) denom += beta[j] * q(i, j);
                for (std::size_t j = 0; j < m; ++j)
                    if (q(i, j) > 0.0) rhs += beta[j] * q(i, j) / denom * p(i, j) / ppp[j];
                note(pint[i], rhs);
            }
            break;
        }

        case Method::GK_MEAN: {
            if (spec.beta.size() != m) throw Error("residual: beta has wrong length");
            const double rho = spec.rho;
            if (rho == 0.0) {
                // Geometric limit: quantity-share weighted log-linear system.
                for (std::size_t j = 0; j < m; ++j) {
                    double colsum = 0.0, log_rhs = 0.0;
                    for (std::size_t i = 0; i < n; ++i) colsum += q(i, j);
                    for (std::size_t i = 0; i < n; ++i)
                        if (q(i, j) > 0.0)
                            log_rhs += q(i, j) / colsum * std::log(pint[i] / p(i, j));
                    note(1.0 / ppp[j], std::exp(log_rhs));
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double denom = 0.0, log_rhs = 0.0;
                    for (std::size_t j = 0; j < m; ++j) denom += spec.beta[j] * q(i, j);
                    for (std::size_t j = 0; j < m; ++j)
                        if (q(i, j) > 0.0)
                            log_rhs += spec.beta[j] * q(i, j) / denom *
                                       std::log(p(i, j) / ppp[j]);
                    note(pint[i], std::exp(log_rhs));
                }
                break;
            }
            for (std::size_t j = 0; j < m; ++j) {
                double colsum = 0.0, rhs = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    colsum += std::pow(p(i, j), rho) * q(i, j);
                for (std::size_t i = 0; i < n; ++i)
                    if (q(i, j) > 0.0) rhs += q(i, j) / colsum * std::pow(pint[i], rho);
                note(std::pow(ppp[j], -rho), rhs);
            }
            for (std::size_t i = 0; i < n; ++i) {
                double denom = 0.0, rhs = 0.0;
                for (std::size_t j = 0; j < m; ++j) denom += spec.beta[j] * q(i, j);
                for (std::size_t j = 0; j < m; ++j)
                    if (q(i, j) > 0.0)
                        rhs += spec.beta[j] * q(i, j) / denom * std::pow(p(i, j), rho) *
                               std::pow(ppp[j], -rho);
                note(std::pow(pint[i], rho), rhs);
            }
            break;
        }

        case Method::EWGK: {
            for (std::size_t j = 0; j < m; ++j) {
                double rhs = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (q(i, j) > 0.0) rhs += shares.w(i, j) * pint[i] / p(i, j);
                note(1.0 / ppp[j], rhs);
            }
            for (std::size_t i = 0; i < n; ++i) {
                double denom = 0.0, rhs = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    if (q(i, j) > 0.0) denom += shares.w(i, j) / p(i, j);
                for (std::size_t j = 0; j < m; ++j)
                    if (q(i, j) > 0.0) rhs += shares.w(i, j) / denom / ppp[j];
                note(pint[i], rhs);
            }
            break;
        }

        case Method::RAO:
        case Method::IDB:
        case Method::ARITH:
        case Method::GEN_MEAN: {
            const double rho = share_rho(spec);
            if (rho == 0.0) {
                for (std::size_t j = 0; j < m; ++j) {
                    double log_rhs = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        if (q(i, j) > 0.0)
                            log_rhs += shares.w(i, j) * std::log(p(i, j) / pint[i]);
                    note(ppp[j], std::exp(log_rhs));
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double log_rhs = 0.0;
                    for (std::size_t j = 0; j < m; ++j)
                        if (q(i, j) > 0.0)
                            log_rhs += shares.w_star(i, j) * std::log(p(i, j) / ppp[j]);
                    note(pint[i], std::exp(log_rhs));
                }
            } else {
                for (std::size_t j = 0; j < m; ++j) {
                    double rhs = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        if (q(i, j) > 0.0)
                            rhs += shares.w(i, j) * std::pow(p(i, j) / pint[i], rho);
                    note(ppp[j], std::pow(rhs, 1.0 / rho));
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double rhs = 0.0;
                    for (std::size_t j = 0; j < m; ++j)
                        if (q(i, j) > 0.0)
                            rhs += shares.w_star(i, j) * std::pow(p(i, j) / ppp[j], rho);
                    note(pint[i], std::pow(rhs, 1.0 / rho));
                }
            }
            break;
        }

        case Method::NEARY:
        case Method::RAO76: {
            if (!spec.preference) throw Error("residual: preference specification required");
            const Matrix q_star = hicksian_demand(pint, d, *spec.preference).q_star;
            for (std::size_t j = 0; j < m; ++j) {
                double expenditure = 0.0, rhs = 0.0;
                for (std::size_t i = 0; i < n; ++i) expenditure += p(i, j) * q(i, j);
                for (std::size_t i = 0; i < n; ++i) rhs += q_star(i, j) * pint[i];
                note(1.0 / ppp[j], rhs / expenditure);
            }
            for (std::size_t i = 0; i < n; ++i) {
                double denom = 0.0, rhs = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    denom += spec.method == Method::NEARY ? q_star(i, j) : q(i, j);
                for (std::size_t j = 0; j < m; ++j)
                    if (q(i, j) > 0.0) rhs += p(i, j) * q(i, j) / ppp[j];
                note(pint[i], rhs / denom);
            }
            break;
        }
    }
    return worst;
}

} // namespace multindex
