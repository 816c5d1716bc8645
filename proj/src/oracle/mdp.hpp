#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "common/types.hpp"

namespace trustpcl::oracle {

/// Small discrete MDP with an explicit model.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  /// transitions[s][a] is a distribution over next states.
  std::vector<std::vector<Vec>> transitions;
  Mat rewards;  // num_states x num_actions
  double gamma = 0.9;
  /// Finite horizon; std::nullopt for the discounted infinite-horizon setting.
  std::optional<int> horizon;
  int start_state = 0;

  /// Throws ConfigError/DomainError on malformed tables.
  void validate() const;
  bool deterministic() const;
  /// Most likely next state; the unique one for deterministic rows.
  int next_state(int s, int a) const;
};

/// JSON table {num_states, num_actions, transitions[s][a], rewards[s][a], horizon}
/// with optional "gamma" and "start_state". A transition entry is either a
/// next-state index or a probability row of length num_states.
TabularMdp mdp_from_json(const nlohmann::json& j);
nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp load_mdp(const std::string& path);

/// Six-state left/right chain used by the tabular learning checks.
TabularMdp default_chain();

}  // namespace trustpcl::oracle
