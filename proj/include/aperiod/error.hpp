#pragma once

#include <stdexcept>
#include <string>

namespace aperiod {

/// Malformed or out-of-contract input (bad model, off-grid time, window overflow...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The solver declined to run: the contraction condition does not hold.
class SolverRefused : public std::runtime_error {
public:
    SolverRefused(const std::string& what, double kappa)
        : std::runtime_error(what), kappa_(kappa) {}
    double kappa() const noexcept { return kappa_; }

private:
    double kappa_;
};

/// A path left the configured divergence ceiling during integration.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aperiod
