#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trainer/config.hpp"

namespace trustpcl::trainer {

/// Everything needed to reproduce a multi-seed run: the resolved config,
/// the seeds, the config hash and where each per-seed artifact lives.
struct RunManifest {
  TrainConfig config;
  std::vector<std::uint64_t> seeds;
  std::string config_hash;
  std::string metrics_pattern = "metrics_seed{seed}.csv";
  std::string checkpoint_pattern = "checkpoint_seed{seed}.json";

  static RunManifest make(const TrainConfig& config, std::vector<std::uint64_t> seeds);
  std::string metrics_file(std::uint64_t seed) const;
  std::string checkpoint_file(std::uint64_t seed) const;
};

std::string manifest_to_json(const RunManifest& manifest);
/// Throws ConfigError when the stored hash does not match the stored config.
RunManifest manifest_from_json(const std::string& text);
void save_manifest(const std::string& path, const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);

}  // namespace trustpcl::trainer
