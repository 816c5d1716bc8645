#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "common/types.hpp"

namespace trustpcl::envs {

enum class ActionKind { kContinuous, kDiscrete };

struct EnvSpec {
  int observation_dim = 0;
  ActionKind action_kind = ActionKind::kContinuous;
  int action_dim = 0;   // continuous
  int num_actions = 0;  // discrete
  Vec action_low;
  Vec action_high;
  Vec observation_low;
  Vec observation_high;
  int max_steps = 1;
};

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool terminal = false;  // true environment termination
  bool timeout = false;   // cut off at max_steps
};

/// Single-owner mutable environment. step() before reset() or after an
/// episode ended throws UsageError.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::unique_ptr<Environment> clone() const = 0;
  virtual std::string id() const = 0;
  virtual EnvSpec spec() const = 0;
  virtual Vec reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Action& action) = 0;
};

/// "point_mass", "pendulum", "chain" (built-in six-state chain) or
/// "chain:<path.json>".
std::unique_ptr<Environment> make_env(const std::string& id);

}  // namespace trustpcl::envs
