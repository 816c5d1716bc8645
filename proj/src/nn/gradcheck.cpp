#include "nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace trustpcl::nn {

double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale <= 1e-12) return 0.0;
  return std::abs(analytic - numeric) / scale;
}

ParamVector numeric_gradient(const LossFn& loss, const ParamVector& params, double h) {
  ParamVector g(params.size());
  ParamVector p = params;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double up = loss(p, nullptr);
    p[i] = orig - h;
    const double down = loss(p, nullptr);
    p[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double finite_diff_check(const LossFn& loss, const ParamVector& params, double h) {
  ParamVector analytic;
  loss(params, &analytic);
  if (analytic.size() != params.size()) throw ShapeError("finite_diff_check: gradient length mismatch");
  const ParamVector numeric = numeric_gradient(loss, params, h);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  }
  return worst;
}

}  // namespace trustpcl::nn
