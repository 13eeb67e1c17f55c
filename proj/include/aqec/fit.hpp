#pragma once

#include <vector>

#include "aqec/errors.hpp"

namespace aqec {

// Gaussian decay model F(t) = A exp(-(t/tau)^2) + C fitted by damped
// least squares. Parameter errors come from the local quadratic model of
// the objective at the optimum.
struct FitResult {
    double a = 0.0, tau = 0.0, c = 0.0;
    double a_err = 0.0, tau_err = 0.0, c_err = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

FitResult fit_gaussian_decay(const std::vector<double>& times,
                             const std::vector<double>& values);

struct LambdaResult {
    double lambda = 0.0;
    double lambda_err = 0.0;
};

LambdaResult lambda_factor(const FitResult& fit_logical, const FitResult& fit_physical);

} // namespace aqec
