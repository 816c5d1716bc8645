#pragma once

#include "common/types.hpp"

namespace trustpcl::trust {

/// Lagged prior parameters: an exponential moving average of the live ones.
struct LagState {
  ParamVector policy;
  ParamVector value;
  double alpha = 0.99;
};

/// prior <- alpha * prior + (1 - alpha) * live, for both parameter sets.
LagState update_lag(const LagState& lag, const ParamVector& policy, const ParamVector& value);

}  // namespace trustpcl::trust
