#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace multindex {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by validate_dataset. Row/column indices are 1-based, matching the
/// commodity/country numbering used in reports; 0 means "not applicable".
class ValidationError : public Error {
public:
    enum class Kind {
        NonPositivePrice,
        NegativeQuantity,
        EmptyCommodityRow,
        EmptyCountryColumn,
        DimensionMismatch,
    };

    ValidationError(Kind kind, std::size_t row, std::size_t col, const std::string& msg)
        : Error(msg), kind(kind), row(row), col(col) {}

    Kind kind;
    std::size_t row = 0;
    std::size_t col = 0;
};

/// Malformed CSV or vector file. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& msg)
        : Error(msg), line(line), column(column) {}

    std::size_t line = 0;
    std::size_t column = 0;
};

class UnsupportedMethodError : public Error {
public:
    explicit UnsupportedMethodError(const std::string& msg) : Error(msg) {}
};

/// An iterative solver ran out of iterations.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(int iterations, double last_delta, const std::string& msg)
        : Error(msg), iterations(iterations), last_delta(last_delta) {}

    int iterations = 0;
    double last_delta = 0.0;
};

/// Recovered transform argument left the positive domain. Cannot occur for
/// irreducible systems; indicates an internal fault.
class TransformDomainError : public Error {
public:
    explicit TransformDomainError(const std::string& msg) : Error(msg) {}
};

/// Cobb-Douglas/CES demand is undefined when a reference bundle has a zero
/// quantity (utility level 0 or a corner solution).
class ZeroQuantityError : public Error {
public:
    ZeroQuantityError(std::size_t row, std::size_t col, const std::string& msg)
        : Error(msg), row(row), col(col) {}

    std::size_t row = 0;
    std::size_t col = 0;
};

/// Sum of row targets and sum of column targets differ; no scaling can exist.
class ScaleMismatchError : public Error {
public:
    explicit ScaleMismatchError(const std::string& msg) : Error(msg) {}
};

/// Instance exceeds the size cap of a brute-force oracle.
class TooLargeError : public Error {
public:
    explicit TooLargeError(const std::string& msg) : Error(msg) {}
};

} // namespace multindex
