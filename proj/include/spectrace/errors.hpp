#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spectrace {

// Base class for all spectrace errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data (Matrix Market syntax, out-of-range indices, ...).
// Carries the 1-based line number of the offending input line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Input violates a mathematical precondition: dimension mismatch, a function
// that is not finite on the requested interval, an invalid adjacency matrix.
class DomainError : public Error {
public:
    using Error::Error;
};

// A Chebyshev recurrence produced a nonfinite intermediate, which signals
// that the operator spectrum escaped the interval the model was built on.
class IntervalViolation : public Error {
public:
    using Error::Error;
};

}  // namespace spectrace
