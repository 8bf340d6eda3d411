#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"
#include "multindex/method.hpp"

namespace multindex {

/// A solved index system: purchasing power parities per country and
/// international average prices per commodity, unique up to one common
/// scale factor that the normalization tag pins down.
struct Solution {
    std::vector<double> ppp;   // length M, strictly positive
    std::vector<double> p_int; // length N, strictly positive
    Normalization normalization = Normalization::FIRST_COUNTRY_ONE;
    int iterations = 0;
    double residual_norm = 0.0;
    double lambda_estimate = 1.0; // dominant-eigenvalue estimate where applicable
};

/// All binary parities P_jk = ppp_k / ppp_j. Transitive by construction.
struct ParityMatrix {
    Matrix parities;
};

inline ParityMatrix binary_parities(const Solution& s) {
    const std::size_t m = s.ppp.size();
    Matrix p(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) p(j, k) = s.ppp[k] / s.ppp[j];
    return ParityMatrix{std::move(p)};
}

inline double geometric_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += std::log(x);
    return std::exp(acc / static_cast<double>(v.size()));
}

/// Rescales ppp to the requested convention and p_int by the inverse
/// factor, which leaves every residual unchanged.
inline Solution normalize_solution(Solution s, Normalization convention) {
    double scale = 1.0;
    switch (convention) {
        case Normalization::FIRST_COUNTRY_ONE: scale = 1.0 / s.ppp.front(); break;
        case Normalization::GEOMEAN_ONE: scale = 1.0 / geometric_mean(s.ppp); break;
    }
    for (double& x : s.ppp) x *= scale;
    for (double& x : s.p_int) x /= scale;
    s.normalization = convention;
    return s;
}

} // namespace multindex
