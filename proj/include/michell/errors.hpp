#pragma once

#include <stdexcept>
#include <string>

namespace michell {

/// Raised when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when two fields or operators are combined with incompatible shapes.
class ShapeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an inner numerical solve does not reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Raised when a load cannot be carried (unbalanced spec, infeasible LP).
class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace michell
