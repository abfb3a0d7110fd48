#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sle {

// Values double as process exit codes for the command-line tool.
enum class ErrorKind : int { Io = 1, Validation = 2, Numeric = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Numeric breakdown during a simulation; carries the offending step when known.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, std::optional<std::size_t> step = std::nullopt)
        : Error(ErrorKind::Numeric, step ? what + " (step " + std::to_string(*step) + ")" : what),
          step_(step) {}

    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    std::optional<std::size_t> step_;
};

/// A forward-flow point hit the driving singularity before the horizon.
class SwallowedError : public NumericError {
public:
    SwallowedError(double time, double gap)
        : NumericError("point swallowed at t=" + std::to_string(time) +
                       " (|g-lambda|=" + std::to_string(gap) + ")"),
          time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace sle
