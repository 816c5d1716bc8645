#include "nn/adam.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace trustpcl::nn {

AdamState AdamState::fresh(Eigen::Index n, double learning_rate) {
  AdamState s;
  s.m = Vec::Zero(n);
  s.v = Vec::Zero(n);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(AdamState& state, ParamVector& params, const ParamVector& grads) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: params, grads and moments must have equal length");
  }
  for (Eigen::Index i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i));
    }
  }
  state.t += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace trustpcl::nn
