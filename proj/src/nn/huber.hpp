#pragma once

#include <cmath>

#include "common/error.hpp"

namespace trustpcl::nn {

struct HuberValue {
  double value;
  double derivative;
};

inline HuberValue huber(double x, double delta) {
  if (!(delta > 0.0)) throw ConfigError("huber: delta must be positive");
  const double ax = std::abs(x);
  if (ax <= delta) return {0.5 * x * x, x};
  return {delta * (ax - 0.5 * delta), x > 0.0 ? delta : -delta};
}

}  // namespace trustpcl::nn
