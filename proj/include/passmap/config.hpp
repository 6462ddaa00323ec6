#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "passmap/passage.hpp"
#include "passmap/ransac.hpp"
#include "passmap/structural.hpp"

namespace passmap {

struct IngestConfig {
  double voxel = 0.05;       // m
  double max_range = 8.0;    // m
  std::size_t min_instance_points = 50;
  double min_observation_extent = 0.3;  // m, smaller in-plane side of an observation
};

struct StrategyConfig {
  bool traversal = true;
  bool gap = true;
};

struct ConnectivityConfig {
  double probe_offset = 0.8;       // m along the wall normal
  double max_seed_distance = 4.0;  // m
};

// Every tunable of the pipeline. Angles are kept in degrees here (the unit of
// the config file); module configs are derived on demand.
struct PipelineConfig {
  IngestConfig ingest;
  RansacConfig ransac;
  double merge_angle_deg = 5.0;
  double merge_offset = 0.10;
  double merge_gap = 0.3;
  double tau_theta_deg = 10.0;
  double tau_d = 0.08;
  double association_radius = 0.3;
  double association_max_angle_deg = 45.0;
  PassageConfig passage;
  StrategyConfig strategy;
  ConnectivityConfig connectivity;

  MergeConfig merge_config() const;
  DoorThresholds door_thresholds() const;

  // Throws ConfigError naming the offending key.
  void validate() const;

  bool operator==(const PipelineConfig& o) const;
};

// One row of the defaults table: name "section.key", unit, description and
// accessors onto PipelineConfig.
struct ConfigKey {
  std::string name;
  std::string unit;
  std::string description;
  std::function<nlohmann::json(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const nlohmann::json&)> set;
};

const std::vector<ConfigKey>& config_keys();

// "key = default unit  description" lines, one per key.
std::string config_help();

// Nested document {"schema":"config/1","ingest":{...},...}. Unknown keys and
// type mismatches throw ConfigError.
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const nlohmann::json& doc);

// Reads a config/1 file; parse failures throw ConfigError naming the file.
PipelineConfig read_config(const std::filesystem::path& path);

// Applies "section.key=value"; the value is parsed as a JSON scalar.
void apply_override(PipelineConfig& cfg, std::string_view assignment);

}  // namespace passmap
