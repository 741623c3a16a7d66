#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sysnr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed data row. `row()` is the 1-based data row (header excluded).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& detail, const std::string& source = {})
        : Error((source.empty() ? std::string() : source + ": ") + "row " + std::to_string(row) + ": " +
                detail),
          row_(row),
          detail_(detail) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t row_;
    std::string detail_;
};

/// Missing or duplicated column in a tabular source.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Input outside the admissible domain (N < 2, N != n*k, K outside [0, 1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// File could not be opened or read.
class IoError : public Error {
public:
    using Error::Error;
};

/// A quantity the formulas divide by is zero or the quadratic has no minimum.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Estimator specification is incomplete or inadmissible.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Evaluation of an estimator on a realization is undefined.
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace sysnr
