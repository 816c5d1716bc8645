#pragma once

#include <cstdint>

#include "common/types.hpp"

namespace trustpcl::nn {

struct AdamState {
  Vec m;
  Vec v;
  std::int64_t t = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState fresh(Eigen::Index n, double learning_rate);
};

/// One bias-corrected Adam update, in place. Throws NumericError on a
/// non-finite gradient entry; params and state are left untouched then.
void adam_step(AdamState& state, ParamVector& params, const ParamVector& grads);

}  // namespace trustpcl::nn
