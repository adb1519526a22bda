#pragma once

#include <stdexcept>
#include <string>

namespace patchflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, invalid symbol parameters, bad expression.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature or series acceleration failed to reach its tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double bracket_width)
        : Error(what), bracket_width_(bracket_width) {}

    [[nodiscard]] double bracket_width() const noexcept { return bracket_width_; }

private:
    double bracket_width_;
};

/// An inverse profile query exceeded the finite image of a non-Osgood profile.
class RangeError : public Error {
public:
    RangeError(const std::string& what, double limit) : Error(what), limit_(limit) {}

    [[nodiscard]] double limit() const noexcept { return limit_; }

private:
    double limit_;
};

/// The solver stopped because patches touched or a curve self-intersected.
class SolverHalt : public Error {
public:
    using Error::Error;
};

}  // namespace patchflow
