#pragma once

#include <stdexcept>
#include <string>

namespace thinfb {

// Precondition violated (weight out of range, bad dimension, refused evaluation).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative method stopped without meeting its tolerance.
class NonconvergenceError : public std::runtime_error {
public:
    NonconvergenceError(const std::string& what, double last_residual)
        : std::runtime_error(what), residual_(last_residual) {}
    double last_residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A least-squares or rank problem too ill-conditioned to trust.
class IllConditionedError : public std::runtime_error {
public:
    IllConditionedError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

}  // namespace thinfb
