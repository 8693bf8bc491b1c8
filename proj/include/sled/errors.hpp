#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sled {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied arguments that violate a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs)
        : InvalidArgument("DimensionMismatch: feature counts differ (" + std::to_string(lhs) +
                          " vs " + std::to_string(rhs) + ")") {}
};

/// Exhaustive enumeration refused because the instance is too large.
class InstanceTooLarge : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Errors that stem from the content of the data rather than the call.
class DataError : public Error {
public:
    using Error::Error;
};

class DegenerateFeature : public DataError {
public:
    explicit DegenerateFeature(std::size_t index)
        : DataError("DegenerateFeature: feature " + std::to_string(index) + " has zero variance"),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class DegenerateVariance : public DataError {
public:
    DegenerateVariance(std::size_t i, std::size_t j)
        : DataError("DegenerateVariance: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") has zero estimated variance") {}
};

/// Parse failures carry the originating location.
class ParseError : public DataError {
public:
    ParseError(const std::string& path, std::size_t line, std::size_t column, const std::string& what)
        : DataError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class RaggedRows : public ParseError {
public:
    RaggedRows(const std::string& path, std::size_t line, std::size_t got, std::size_t expected)
        : ParseError(path, line, got, "RaggedRows: expected " + std::to_string(expected) +
                                          " cells, found " + std::to_string(got)) {}
};

class NonNumericCell : public ParseError {
public:
    NonNumericCell(const std::string& path, std::size_t line, std::size_t column, const std::string& cell)
        : ParseError(path, line, column, "NonNumericCell: '" + cell + "' is not a finite number") {}
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sled
