#pragma once

#include <stdexcept>
#include <string>

namespace gsbm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands with incompatible dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter combination (penalties, probabilities, empty masks).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed caller input that is not a file-format problem.
class InputError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A fit file written by an incompatible version of the format.
class VersionError : public ParseError {
public:
    using ParseError::ParseError;
};

/// An iterative numerical routine did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, int iteration = -1)
        : Error(what), residual_(residual), iteration_(iteration) {}

    double residual() const noexcept { return residual_; }
    /// Outer solver iteration at which the failure surfaced, -1 if unknown.
    int iteration() const noexcept { return iteration_; }

private:
    double residual_;
    int iteration_;
};

}  // namespace gsbm
