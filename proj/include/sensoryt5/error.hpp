#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sensoryt5 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when one applies.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// A forward value or loss became NaN/Inf.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace sensoryt5
