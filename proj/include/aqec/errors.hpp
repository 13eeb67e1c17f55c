#pragma once

#include <stdexcept>
#include <string>

namespace aqec {

// Raised when a spin manifold cannot host the requested code.
struct unsupported_manifold : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a truncated expansion (Kraus order, Fock cutoff) cannot reach
// the requested accuracy.
struct truncation_too_small : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when the time-ordered integrator fails its convergence contract.
struct integration_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when nonlinear curve fitting does not converge; carries the
// residual trace for diagnostics.
struct fit_failure : std::runtime_error {
    fit_failure(const std::string& what, std::string residual_trace)
        : std::runtime_error(what), residuals(std::move(residual_trace)) {}
    std::string residuals;
};

} // namespace aqec
