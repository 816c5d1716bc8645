#include "trainer/config.hpp"

#include <openssl/sha.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "common/error.hpp"

namespace trustpcl::trainer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || std::isnan(x)) {
    throw ConfigError("invalid value for '" + key + "': '" + text + "' is not a number");
  }
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid value for '" + key + "': '" + text + "' is not an integer");
  }
  return x;
}

int parse_int32(const std::string& key, const std::string& text) {
  const auto x = parse_int(key, text);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError("invalid value for '" + key + "': out of range");
  }
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("invalid value for '" + key + "': expected true or false");
}

std::vector<int> parse_widths(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const int w = parse_int32(key, item);
    if (w <= 0) throw ConfigError("invalid value for '" + key + "': widths must be positive");
    out.push_back(w);
  }
  return out;
}

std::string join_widths(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

struct KeySpec {
  std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> names;
  E parse(const std::string& key, const std::string& text) const {
    const std::string t = trim(text);
    for (const auto& [e, n] : names) {
      if (n == t) return e;
    }
    std::string allowed;
    for (const auto& [e, n] : names) allowed += (allowed.empty() ? "" : "|") + n;
    throw ConfigError("invalid value for '" + key + "': expected " + allowed);
  }
  std::string name(E e) const {
    for (const auto& [v, n] : names) {
      if (v == e) return n;
    }
    return "?";
  }
};

const EnumNames<LambdaMode> kLambdaModes{{{LambdaMode::kAuto, "auto"}, {LambdaMode::kFixed, "fixed"}}};
const EnumNames<TauSchedule> kTauSchedules{{{TauSchedule::kConstant, "constant"}, {TauSchedule::kDecay, "decay"}}};
const EnumNames<ReferenceKind> kReferences{{{ReferenceKind::kLagged, "lagged"}, {ReferenceKind::kUniform, "uniform"}}};

#define TPCL_DOUBLE(field) \
  KeySpec{[](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_double(k, v); }, \
          [](const TrainConfig& c) { return format_double(c.field); }}
#define TPCL_INT(field) \
  KeySpec{[](TrainConfig& c, const std::string& k, const std::string& v) { c.field = parse_int32(k, v); }, \
          [](const TrainConfig& c) { return std::to_string(c.field); }}
#define TPCL_ENUM(field, table) \
  KeySpec{[](TrainConfig& c, const std::string& k, const std::string& v) { c.field = table.parse(k, v); }, \
          [](const TrainConfig& c) { return table.name(c.field); }}

// Ordered: serialization follows this order.
const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  static const std::vector<std::pair<std::string, KeySpec>> table{
      {"env", KeySpec{[](TrainConfig& c, const std::string& k, const std::string& v) {
                        if (trim(v).empty()) throw ConfigError("invalid value for '" + k + "': empty");
                        c.env = trim(v);
                      },
                      [](const TrainConfig& c) { return c.env; }}},
      {"epsilon", TPCL_DOUBLE(epsilon)},
      {"lambda.mode", TPCL_ENUM(lambda_mode, kLambdaModes)},
      {"lambda.value", TPCL_DOUBLE(lambda_value)},
      {"lambda.min", TPCL_DOUBLE(lambda_min)},
      {"lambda.max", TPCL_DOUBLE(lambda_max)},
      {"rollout", TPCL_INT(rollout)},
      {"gamma", TPCL_DOUBLE(gamma)},
      {"collect_steps", TPCL_INT(collect_steps)},
      {"batch_transitions", TPCL_INT(batch_transitions)},
      {"lag_alpha", TPCL_DOUBLE(lag_alpha)},
      {"replay.beta", TPCL_DOUBLE(replay_beta)},
      {"replay.capacity", TPCL_INT(replay_capacity)},
      {"lr.policy", TPCL_DOUBLE(lr_policy)},
      {"lr.value", TPCL_DOUBLE(lr_value)},
      {"tau.schedule", TPCL_ENUM(tau_schedule, kTauSchedules)},
      {"tau.initial", TPCL_DOUBLE(tau_initial)},
      {"tau.decay_factor", TPCL_DOUBLE(tau_decay_factor)},
      {"tau.decay_interval", TPCL_DOUBLE(tau_decay_interval)},
      {"train_steps", KeySpec{[](TrainConfig& c, const std::string& k,
                                 const std::string& v) { c.train_steps = parse_int(k, v); },
                              [](const TrainConfig& c) { return std::to_string(c.train_steps); }}},
      {"eval.interval", TPCL_INT(eval_interval)},
      {"eval.episodes", TPCL_INT(eval_episodes)},
      {"value_steps", TPCL_INT(value_steps)},
      {"huber_delta", TPCL_DOUBLE(huber_delta)},
      {"reference", TPCL_ENUM(reference, kReferences)},
      {"policy.init_log_std", TPCL_DOUBLE(init_log_std)},
      {"network.hidden", KeySpec{[](TrainConfig& c, const std::string& k,
                                    const std::string& v) { c.hidden = parse_widths(k, v); },
                                 [](const TrainConfig& c) { return join_widths(c.hidden); }}},
      {"log.wall_clock", KeySpec{[](TrainConfig& c, const std::string& k,
                                    const std::string& v) { c.wall_clock = parse_bool(k, v); },
                                 [](const TrainConfig& c) { return std::string(c.wall_clock ? "true" : "false"); }}},
  };
  return table;
}

#undef TPCL_DOUBLE
#undef TPCL_INT
#undef TPCL_ENUM

const KeySpec& find_key(const std::string& key) {
  for (const auto& [k, spec] : key_table()) {
    if (k == key) return spec;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw ConfigError("invalid value for '" + key + "': " + why);
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void TrainConfig::validate() const {
  if (env.empty()) invalid("env", "empty");
  if (!(epsilon > 0.0)) invalid("epsilon", "must be > 0");
  if (!(lambda_value >= 0.0) || std::isinf(lambda_value)) invalid("lambda.value", "must be finite and >= 0");
  if (!(lambda_min > 0.0)) invalid("lambda.min", "must be > 0");
  if (!(lambda_max > lambda_min) || std::isinf(lambda_max)) invalid("lambda.max", "must be finite and > lambda.min");
  if (rollout < 1) invalid("rollout", "must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) invalid("gamma", "must lie in (0, 1]");
  if (collect_steps < 1) invalid("collect_steps", "must be >= 1");
  if (batch_transitions < collect_steps) invalid("batch_transitions", "must be >= collect_steps");
  if (!(lag_alpha >= 0.0 && lag_alpha <= 1.0)) invalid("lag_alpha", "must lie in [0, 1]");
  if (!(replay_beta >= 0.0) || std::isinf(replay_beta)) invalid("replay.beta", "must be finite and >= 0");
  if (replay_capacity < 1) invalid("replay.capacity", "must be >= 1");
  if (!(lr_policy >= 0.0) || std::isinf(lr_policy)) invalid("lr.policy", "must be finite and >= 0");
  if (!(lr_value >= 0.0) || std::isinf(lr_value)) invalid("lr.value", "must be finite and >= 0");
  if (!(tau_initial >= 0.0) || std::isinf(tau_initial)) invalid("tau.initial", "must be finite and >= 0");
  if (!(tau_decay_factor > 0.0 && tau_decay_factor <= 1.0)) invalid("tau.decay_factor", "must lie in (0, 1]");
  if (!(tau_decay_interval > 0.0)) invalid("tau.decay_interval", "must be > 0");
  if (train_steps < 0) invalid("train_steps", "must be >= 0");
  if (eval_interval < 1) invalid("eval.interval", "must be >= 1");
  if (eval_episodes < 1) invalid("eval.episodes", "must be >= 1");
  if (value_steps < 1) invalid("value_steps", "must be >= 1");
  if (!(huber_delta > 0.0)) invalid("huber_delta", "must be > 0");
  if (!std::isfinite(init_log_std)) invalid("policy.init_log_std", "must be finite");
  if (hidden.empty()) invalid("network.hidden", "need at least one hidden layer");
}

double TrainConfig::tau_at(std::int64_t iteration) const {
  if (tau_schedule == TauSchedule::kConstant) return tau_initial;
  return tau_initial * std::pow(tau_decay_factor, static_cast<double>(iteration) / tau_decay_interval);
}

bool TrainConfig::pcl_limit() const { return std::isinf(epsilon); }

TrainConfig preset(const std::string& name) {
  TrainConfig c;
  if (name == "off_policy" || name == "default") return c;
  if (name == "on_policy") {
    c.lag_alpha = 0.95;
    c.replay_beta = 0.1;
    c.collect_steps = 1000;
    c.batch_transitions = 25 * 1000;
    c.lr_policy = 1e-3;
    c.lr_value = 1e-3;
    c.value_steps = 5;
    c.train_steps = 400;
    c.eval_interval = 5;
    return c;
  }
  if (name == "chain_tabular") {
    c.env = "chain";
    c.gamma = 0.9;
    c.lambda_mode = LambdaMode::kFixed;
    c.lambda_value = 0.5;
    c.tau_schedule = TauSchedule::kConstant;
    c.tau_initial = 0.1;
    c.reference = ReferenceKind::kUniform;
    c.rollout = 5;
    c.lr_policy = 1e-3;
    c.lr_value = 1e-3;
    c.replay_beta = 0.0;
    c.train_steps = 50000;
    c.eval_interval = 1000;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"off_policy", "on_policy", "chain_tabular"}; }

void set_key(TrainConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, key, value);
}

std::string get_key(const TrainConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, spec] : key_table()) keys.push_back(k);
  return keys;
}

std::string serialize(const TrainConfig& cfg) {
  std::string out;
  for (const auto& [k, spec] : key_table()) out += k + " = " + spec.get(cfg) + "\n";
  return out;
}

TrainConfig parse(const std::string& text, const TrainConfig& base) {
  TrainConfig cfg = base;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool seen_key = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "preset") {
      if (seen_key) throw ConfigError("config line " + std::to_string(lineno) + ": 'preset' must come first");
      cfg = preset(value);
    } else {
      set_key(cfg, key, value);
    }
    seen_key = true;
  }
  return cfg;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string git_blob_sha1(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof(buf), "%02x", b);
    hex += buf;
  }
  return hex;
}

std::string config_hash(const TrainConfig& cfg) { return git_blob_sha1(serialize(cfg)); }

}  // namespace trustpcl::trainer
