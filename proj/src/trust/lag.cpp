#include "trust/lag.hpp"

#include "common/error.hpp"

namespace trustpcl::trust {

LagState update_lag(const LagState& lag, const ParamVector& policy, const ParamVector& value) {
  if (lag.policy.size() != policy.size() || lag.value.size() != value.size()) {
    throw ShapeError("update_lag: lagged and live parameters differ in shape");
  }
  if (!(lag.alpha >= 0.0 && lag.alpha <= 1.0)) throw ConfigError("update_lag: alpha must lie in [0, 1]");
  LagState out;
  out.alpha = lag.alpha;
  out.policy = lag.alpha * lag.policy + (1.0 - lag.alpha) * policy;
  out.value = lag.alpha * lag.value + (1.0 - lag.alpha) * value;
  return out;
}

}  // namespace trustpcl::trust
