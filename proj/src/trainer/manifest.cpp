#include "trainer/manifest.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "common/error.hpp"

namespace trustpcl::trainer {

namespace {

constexpr const char* kFormat = "trustpcl-manifest-v1";

std::string substitute(std::string pattern, std::uint64_t seed) {
  const std::string tag = "{seed}";
  if (const auto at = pattern.find(tag); at != std::string::npos) pattern.replace(at, tag.size(), std::to_string(seed));
  return pattern;
}

}  // namespace

RunManifest RunManifest::make(const TrainConfig& config, std::vector<std::uint64_t> seeds) {
  config.validate();
  RunManifest m;
  m.config = config;
  m.seeds = std::move(seeds);
  m.config_hash = trainer::config_hash(config);
  return m;
}

std::string RunManifest::metrics_file(std::uint64_t seed) const { return substitute(metrics_pattern, seed); }
std::string RunManifest::checkpoint_file(std::uint64_t seed) const { return substitute(checkpoint_pattern, seed); }

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["config"] = serialize(m.config);
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  j["layout"] = {{"metrics", m.metrics_pattern}, {"checkpoint", m.checkpoint_pattern}, {"manifest", "manifest.json"}};
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (j.value("format", "") != kFormat) throw ConfigError("manifest: unknown format");
  try {
    RunManifest m;
    m.config = parse(j.at("config").get<std::string>());
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.metrics_pattern = j.at("layout").at("metrics").get<std::string>();
    m.checkpoint_pattern = j.at("layout").at("checkpoint").get<std::string>();
    if (config_hash(m.config) != m.config_hash) throw ConfigError("manifest: config_hash does not match config");
    m.config.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

void save_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path);
  out << manifest_to_json(manifest);
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace trustpcl::trainer
