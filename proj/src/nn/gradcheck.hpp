#pragma once

#include <functional>

#include "common/types.hpp"

namespace trustpcl::nn {

/// Scalar loss of a parameter vector. When `grad` is non-null the function
/// also writes its analytic gradient there.
using LossFn = std::function<double(const ParamVector& params, ParamVector* grad)>;

/// Relative error between two gradient entries; 0 when both are below 1e-12.
double relative_error(double analytic, double numeric);

/// Central-difference gradient of `loss` at `params`.
ParamVector numeric_gradient(const LossFn& loss, const ParamVector& params, double h = 1e-5);

/// Max over coordinates of the relative error between the analytic gradient
/// of `loss` and its central differences with step `h`.
double finite_diff_check(const LossFn& loss, const ParamVector& params, double h = 1e-5);

}  // namespace trustpcl::nn
