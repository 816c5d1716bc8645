#include "models/serialize.hpp"

#include <fstream>
#include <vector>

#include "common/error.hpp"

namespace trustpcl::models {

using nlohmann::json;

namespace {

std::vector<int> hidden_of(const std::vector<int>& widths) {
  if (widths.size() < 2) throw ConfigError("checkpoint: widths need at least input and output");
  return {widths.begin() + 1, widths.end() - 1};
}

ParamVector params_of(const json& j, std::size_t expected) {
  const auto values = j.at("params").get<std::vector<double>>();
  if (values.size() != expected) {
    throw ShapeError("checkpoint: params has " + std::to_string(values.size()) + " entries, manifest implies " +
                     std::to_string(expected));
  }
  return Eigen::Map<const ParamVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> to_std(const ParamVector& p) { return {p.data(), p.data() + p.size()}; }

}  // namespace

json policy_to_json(const Policy& policy) {
  json j;
  j["kind"] = policy.kind();
  j["observation_dim"] = policy.observation_dim();
  if (const auto* g = dynamic_cast<const GaussianPolicy*>(&policy)) {
    j["action_dim"] = g->action_dim();
    j["widths"] = g->mean_net().widths();
  } else if (const auto* c = dynamic_cast<const CategoricalPolicy*>(&policy)) {
    j["num_actions"] = c->num_actions();
    j["widths"] = c->logit_net().widths();
  } else {
    throw ConfigError("checkpoint: policy kind '" + policy.kind() + "' is not serializable");
  }
  j["params"] = to_std(policy.params());
  return j;
}

std::unique_ptr<Policy> policy_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int obs_dim = j.at("observation_dim").get<int>();
  const auto widths = j.at("widths").get<std::vector<int>>();
  std::unique_ptr<Policy> p;
  if (kind == "gaussian") {
    p = std::make_unique<GaussianPolicy>(obs_dim, j.at("action_dim").get<int>(), hidden_of(widths));
  } else if (kind == "categorical") {
    p = std::make_unique<CategoricalPolicy>(obs_dim, j.at("num_actions").get<int>(), hidden_of(widths));
  } else {
    throw ConfigError("checkpoint: unknown policy kind '" + kind + "'");
  }
  p->set_params(params_of(j, p->num_params()));
  return p;
}

json value_to_json(const ValueNet& value) {
  json j;
  j["kind"] = "value";
  j["observation_dim"] = value.observation_dim();
  j["widths"] = value.net().widths();
  j["params"] = to_std(value.params());
  return j;
}

std::unique_ptr<ValueNet> value_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "value") throw ConfigError("checkpoint: expected a value model");
  auto v = std::make_unique<ValueNet>(j.at("observation_dim").get<int>(),
                                      hidden_of(j.at("widths").get<std::vector<int>>()));
  v->set_params(params_of(j, v->num_params()));
  return v;
}

void save_checkpoint(const std::string& path, const Policy& policy, const ValueNet& value) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path);
  json j;
  j["format"] = "trustpcl-checkpoint-v1";
  j["policy"] = policy_to_json(policy);
  j["value"] = value_to_json(value);
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  try {
    return {policy_from_json(j.at("policy")), value_from_json(j.at("value"))};
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace trustpcl::models
