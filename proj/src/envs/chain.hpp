#pragma once

#include "envs/env.hpp"
#include "oracle/mdp.hpp"

namespace trustpcl::envs {

/// Environment view of a tabular MDP: one-hot observations, discrete actions,
/// episodes always start at the table's start state and time out at its
/// horizon (100 when the table has none).
class ChainEnv final : public Environment {
 public:
  static constexpr int kDefaultMaxSteps = 100;

  explicit ChainEnv(oracle::TabularMdp mdp, std::string id = "chain");

  std::unique_ptr<Environment> clone() const override { return std::make_unique<ChainEnv>(*this); }
  std::string id() const override { return id_; }
  EnvSpec spec() const override;
  Vec reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;

  const oracle::TabularMdp& mdp() const { return mdp_; }
  int state() const { return state_; }
  Vec one_hot(int s) const;

 private:
  oracle::TabularMdp mdp_;
  std::string id_;
  Rng rng_;
  int state_ = 0;
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace trustpcl::envs
