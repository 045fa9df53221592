#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sympdyn {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of an operation (t < t0, h <= 0, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Shape mismatch between matrices / ensembles.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// A score exponent X_i^T A X_j exceeded the overflow guard; names the pair.
class ScoreOverflowError : public Error {
public:
    ScoreOverflowError(std::size_t i, std::size_t j, double value, double guard)
        : Error("score overflow at pair (" + std::to_string(i) + ", " + std::to_string(j) +
                "): exponent " + std::to_string(value) + " exceeds guard " + std::to_string(guard)),
          i_(i), j_(j), value_(value) {}

    std::size_t row() const noexcept { return i_; }
    std::size_t col() const noexcept { return j_; }
    double value() const noexcept { return value_; }

private:
    std::size_t i_, j_;
    double value_;
};

// Factorization failures (near-singular A, non-SPD covariance).
class SingularMatrixError : public Error {
public:
    explicit SingularMatrixError(const std::string& msg) : Error(msg) {}
};

// Config / weight-file parse problems; carries the offending line when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace sympdyn
