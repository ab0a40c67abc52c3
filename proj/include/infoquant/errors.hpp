#ifndef INFOQUANT_ERRORS_HPP
#define INFOQUANT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace iq {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unsupported image payload.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Zero-area or otherwise impossible raster dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Image too small for the requested geometric split.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Record/feature lists do not line up one-to-one.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A value is outside the mathematical domain of a transform (log of
/// a non-positive measure, non-positive price, n <= k, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Categorical label not declared in the model specification.
class UnknownLevelError : public Error {
public:
    using Error::Error;
};

/// Design matrix is rank deficient; carries the offending column names.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(const std::string& what, std::vector<std::string> columns)
        : Error(what), columns_(std::move(columns)) {}
    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::vector<std::string> columns_;
};

/// Prediction row does not match the fitted columns.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Feature vectors produced under different configs or resolutions.
class ConfigMismatchError : public Error {
public:
    using Error::Error;
};

/// A required information-term column is absent from the fit.
class MissingTermError : public Error {
public:
    using Error::Error;
};

/// Structural CSV/JSON failure; carries the 1-based row and column.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int row, int column = 0)
        : Error(what), row_(row), column_(column) {}
    int row() const { return row_; }
    int column() const { return column_; }

private:
    int row_;
    int column_;
};

/// A parsed record violates a domain invariant; carries the 1-based row.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, int row) : Error(what), row_(row) {}
    int row() const { return row_; }

private:
    int row_;
};

}  // namespace iq

#endif  // INFOQUANT_ERRORS_HPP
