#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "models/networks.hpp"

namespace trustpcl::models {

// Checkpoint layout: each model is a JSON object carrying a shape manifest
// ("kind", "observation_dim", "widths", plus "action_dim"/"num_actions")
// next to the flat "params" array in ParamVector order.

nlohmann::json policy_to_json(const Policy& policy);
std::unique_ptr<Policy> policy_from_json(const nlohmann::json& j);

nlohmann::json value_to_json(const ValueNet& value);
std::unique_ptr<ValueNet> value_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Policy& policy, const ValueNet& value);

struct Checkpoint {
  std::unique_ptr<Policy> policy;
  std::unique_ptr<ValueNet> value;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace trustpcl::models
