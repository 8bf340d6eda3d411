#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"

namespace multindex {

/// Validated price/quantity data for N commodities across M countries.
///
/// Invariants (enforced by validate_dataset):
///   - every price entry is strictly positive,
///   - every quantity entry is non-negative,
///   - every commodity row of q has at least one positive entry,
///   - every country column of q has at least one positive entry.
struct Dataset {
    std::size_t n_commodities = 0;
    std::size_t n_countries = 0;
    Matrix prices;     // currency units of each country per physical unit
    Matrix quantities; // physical units, zero marks "not consumed"
    std::vector<std::string> commodity_labels;
    std::vector<std::string> country_labels;
};

/// Expenditure shares w and cross-country normalized shares w*.
/// Columns of w sum to 1; rows of w_star sum to 1; support equals the
/// support of the quantity matrix.
struct SharesView {
    Matrix w;
    Matrix w_star;
};

inline std::vector<std::string> default_labels(const char* prefix, std::size_t n) {
    std::vector<std::string> ls;
    ls.reserve(n);
    for (std::size_t k = 0; k < n; ++k) ls.push_back(prefix + std::to_string(k + 1));
    return ls;
}

/// Checks every dataset rule and returns a Dataset, or throws a
/// ValidationError naming the first violated rule and its 1-based index.
inline Dataset validate_dataset(const Matrix& prices, const Matrix& quantities,
                                std::vector<std::string> commodity_labels = {},
                                std::vector<std::string> country_labels = {}) {
    if (prices.rows() == 0 || prices.cols() == 0)
        throw ValidationError(ValidationError::Kind::DimensionMismatch, 0, 0,
                              "price matrix is empty");
    if (prices.rows() != quantities.rows() || prices.cols() != quantities.cols())
        throw ValidationError(ValidationError::Kind::DimensionMismatch, 0, 0,
                              "prices are " + std::to_string(prices.rows()) + "x" +
                                  std::to_string(prices.cols()) + " but quantities are " +
                                  std::to_string(quantities.rows()) + "x" +
                                  std::to_string(quantities.cols()));

    const std::size_t n = prices.rows();
    const std::size_t m = prices.cols();

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (!(prices(i, j) > 0.0))
                throw ValidationError(ValidationError::Kind::NonPositivePrice, i + 1, j + 1,
                                      "price of commodity " + std::to_string(i + 1) +
                                          " in country " + std::to_string(j + 1) +
                                          " is not strictly positive");
            if (quantities(i, j) < 0.0)
                throw ValidationError(ValidationError::Kind::NegativeQuantity, i + 1, j + 1,
                                      "quantity of commodity " + std::to_string(i + 1) +
                                          " in country " + std::to_string(j + 1) +
                                          " is negative");
        }

    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < m; ++j) any = any || quantities(i, j) > 0.0;
        if (!any)
            throw ValidationError(ValidationError::Kind::EmptyCommodityRow, i + 1, 0,
                                  "commodity " + std::to_string(i + 1) +
                                      " is consumed in no country");
    }
    for (std::size_t j = 0; j < m; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) any = any || quantities(i, j) > 0.0;
        if (!any)
            throw ValidationError(ValidationError::Kind::EmptyCountryColumn, 0, j + 1,
                                  "country " + std::to_string(j + 1) +
                                      " consumes no commodity");
    }

    if (commodity_labels.empty()) commodity_labels = default_labels("c", n);
    if (country_labels.empty()) country_labels = default_labels("k", m);
    if (commodity_labels.size() != n || country_labels.size() != m)
        throw ValidationError(ValidationError::Kind::DimensionMismatch, 0, 0,
                              "label count does not match matrix dimensions");

    return Dataset{n, m, prices, quantities, std::move(commodity_labels),
                   std::move(country_labels)};
}

/// w_ij = p_ij q_ij / sum_n p_nj q_nj and w*_ij = w_ij / sum_m w_im.
/// Dataset invariants guarantee both denominators are positive.
inline SharesView expenditure_shares(const Dataset& d) {
    const std::size_t n = d.n_commodities;
    const std::size_t m = d.n_countries;
    Matrix w(n, m);

    for (std::size_t j = 0; j < m; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += d.prices(i, j) * d.quantities(i, j);
        for (std::size_t i = 0; i < n; ++i)
            w(i, j) = d.prices(i, j) * d.quantities(i, j) / total;
    }

    Matrix w_star(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) total += w(i, j);
        for (std::size_t j = 0; j < m; ++j) w_star(i, j) = w(i, j) / total;
    }

    return SharesView{std::move(w), std::move(w_star)};
}

} // namespace multindex
