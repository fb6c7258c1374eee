#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ela {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input row. `line` is 1-based and counts the header.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Candle data does not cover a round's window.
class CoverageError : public Error {
public:
    CoverageError(long long round_id, const std::string& what)
        : Error("round " + std::to_string(round_id) + ": " + what), round_id_(round_id) {}
    long long round_id() const noexcept { return round_id_; }

private:
    long long round_id_;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ela
