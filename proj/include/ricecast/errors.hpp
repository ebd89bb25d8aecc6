#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ricecast {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptySeries : Error {
    using Error::Error;
};

/// Raised while reading CSV or fit documents. `row` is 1-based (header is
/// row 1); `column` is empty when the failure is not tied to one cell.
struct ParseError : Error {
    std::size_t row = 0;
    std::string column;

    ParseError(std::size_t row_, const std::string& message)
        : Error("row " + std::to_string(row_) + ": " + message), row(row_) {}
    ParseError(std::size_t row_, std::string column_, const std::string& message)
        : Error("row " + std::to_string(row_) + ", column " + column_ + ": " + message),
          row(row_),
          column(std::move(column_)) {}
};

struct DuplicateDate : Error {
    using Error::Error;
};

struct UnsortedInput : Error {
    using Error::Error;
};

struct LeadingMissing : Error {
    using Error::Error;
};

struct TooShort : Error {
    using Error::Error;
};

struct NonStationary : Error {
    using Error::Error;
};

struct DegenerateVariance : Error {
    using Error::Error;
};

struct SampleTooSmall : Error {
    using Error::Error;
};

struct DegreesOfFreedom : Error {
    using Error::Error;
};

struct NoViableModel : Error {
    using Error::Error;
};

}  // namespace ricecast
