#pragma once

#include <stdexcept>
#include <string>

namespace tbeval {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file: carries file, 1-based line and column of the offense.
class LoadError : public Error {
public:
    LoadError(std::string file, std::size_t line, std::size_t column, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          file_(std::move(file)), line_(line), column_(column) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

/// Referential-integrity or uniqueness violation in otherwise parseable data.
class IntegrityError : public Error {
public:
    using Error::Error;
};

}  // namespace tbeval
