#include "passmap/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "passmap/errors.hpp"

namespace passmap {

using nlohmann::json;

namespace {

constexpr double kDeg = M_PI / 180.0;

template <typename T>
ConfigKey key(std::string name, std::string unit, std::string description, T PipelineConfig::*field) {
  return {std::move(name), std::move(unit), std::move(description),
          [field](const PipelineConfig& c) { return json(c.*field); },
          [field](PipelineConfig& c, const json& v) { c.*field = v.get<T>(); }};
}

template <typename S, typename T>
ConfigKey sub(std::string name, std::string unit, std::string description, S PipelineConfig::*section,
              T S::*field) {
  return {std::move(name), std::move(unit), std::move(description),
          [section, field](const PipelineConfig& c) { return json(c.*section.*field); },
          [section, field](PipelineConfig& c, const json& v) { c.*section.*field = v.get<T>(); }};
}

std::vector<ConfigKey> build_keys() {
  using P = PassageConfig;
  std::vector<ConfigKey> k;
  k.push_back(sub("ingest.voxel", "m", "voxel size of per-instance downsampling", &PipelineConfig::ingest, &IngestConfig::voxel));
  k.push_back(sub("ingest.max_range", "m", "drop points farther than this from the camera", &PipelineConfig::ingest, &IngestConfig::max_range));
  k.push_back(sub("ingest.min_instance_points", "points", "instances smaller than this are ignored", &PipelineConfig::ingest, &IngestConfig::min_instance_points));
  k.push_back(sub("ingest.min_observation_extent", "m", "smaller in-plane side an observation must reach", &PipelineConfig::ingest, &IngestConfig::min_observation_extent));
  k.push_back(sub("ransac.inlier_threshold", "m", "plane inlier distance (epsilon)", &PipelineConfig::ransac, &RansacConfig::inlier_threshold));
  k.push_back(sub("ransac.max_iterations", "count", "RANSAC hypotheses per instance", &PipelineConfig::ransac, &RansacConfig::max_iterations));
  k.push_back(sub("ransac.min_inlier_ratio", "fraction", "consensus needed to accept a plane", &PipelineConfig::ransac, &RansacConfig::min_inlier_ratio));
  k.push_back(sub("ransac.rng_seed", "integer", "base seed; per-instance seeds derive from it", &PipelineConfig::ransac, &RansacConfig::rng_seed));
  k.push_back(key("merge.angle_deg", "deg", "max normal angle to merge an observation into an entity", &PipelineConfig::merge_angle_deg));
  k.push_back(key("merge.offset", "m", "max plane offset difference to merge", &PipelineConfig::merge_offset));
  k.push_back(key("merge.gap", "m", "max in-plane bbox separation to merge", &PipelineConfig::merge_gap));
  k.push_back(key("door.tau_theta_deg", "deg", "coplanarity angle threshold for a closed door", &PipelineConfig::tau_theta_deg));
  k.push_back(key("door.tau_d", "m", "coplanarity offset threshold for a closed door", &PipelineConfig::tau_d));
  k.push_back(key("door.association_radius", "m", "max door-centroid distance to its supporting wall", &PipelineConfig::association_radius));
  k.push_back(key("door.association_max_angle_deg", "deg", "max door/wall angle for association", &PipelineConfig::association_max_angle_deg));
  k.push_back(sub("passage.d_max", "m", "camera-to-wall distance gate for traversal events", &PipelineConfig::passage, &P::d_max));
  k.push_back(sub("passage.window", "keyframes", "sliding window for traversal consistency", &PipelineConfig::passage, &P::window));
  k.push_back(sub("passage.cell_size", "m", "wall raster cell size", &PipelineConfig::passage, &P::cell_size));
  k.push_back(sub("passage.tau_rho", "points/cell", "cells below this count are empty", &PipelineConfig::passage, &P::tau_rho));
  k.push_back(sub("passage.min_gap_w", "m", "minimum opening width", &PipelineConfig::passage, &P::min_gap_w));
  k.push_back(sub("passage.max_gap_w", "m", "maximum opening width", &PipelineConfig::passage, &P::max_gap_w));
  k.push_back(sub("passage.min_gap_h", "m", "minimum opening height", &PipelineConfig::passage, &P::min_gap_h));
  k.push_back(sub("passage.max_gap_h", "m", "maximum opening height", &PipelineConfig::passage, &P::max_gap_h));
  k.push_back(sub("passage.door_proximity", "m", "door-to-opening distance for doorway classification", &PipelineConfig::passage, &P::door_proximity));
  k.push_back(sub("passage.dedupe_radius", "m", "same-wall passages closer than this are fused", &PipelineConfig::passage, &P::dedupe_radius));
  k.push_back({"passage.default_width", "m", "extent width of passages without door geometry",
               [](const PipelineConfig& c) { return json(c.passage.default_extent.x()); },
               [](PipelineConfig& c, const json& v) { c.passage.default_extent.x() = v.get<double>(); }});
  k.push_back({"passage.default_height", "m", "extent height of passages without door geometry",
               [](const PipelineConfig& c) { return json(c.passage.default_extent.y()); },
               [](PipelineConfig& c, const json& v) { c.passage.default_extent.y() = v.get<double>(); }});
  k.push_back(sub("passage.gap_check_interval", "keyframes", "passage refresh period", &PipelineConfig::passage, &P::gap_check_interval));
  k.push_back(sub("passage.min_gap_inliers", "points", "walls with fewer inliers are not searched for gaps", &PipelineConfig::passage, &P::min_gap_inliers));
  k.push_back(sub("passage.conf_closed_door", "[0,1]", "confidence of closed-door passages", &PipelineConfig::passage, &P::conf_closed_door));
  k.push_back(sub("passage.conf_gap", "[0,1]", "confidence of validated gaps", &PipelineConfig::passage, &P::conf_gap));
  k.push_back(sub("passage.conf_traversal_door", "[0,1]", "confidence of traversals next to a door", &PipelineConfig::passage, &P::conf_traversal_door));
  k.push_back(sub("passage.conf_traversal", "[0,1]", "confidence of traversals without a door", &PipelineConfig::passage, &P::conf_traversal));
  k.push_back(sub("strategy.traversal", "bool", "enable traversal-evidence detection", &PipelineConfig::strategy, &StrategyConfig::traversal));
  k.push_back(sub("strategy.gap", "bool", "enable geometric opening detection", &PipelineConfig::strategy, &StrategyConfig::gap));
  k.push_back(sub("connectivity.probe_offset", "m", "probe distance on each side of a passage", &PipelineConfig::connectivity, &ConnectivityConfig::probe_offset));
  k.push_back(sub("connectivity.max_seed_distance", "m", "max probe-to-room-seed distance", &PipelineConfig::connectivity, &ConnectivityConfig::max_seed_distance));
  return k;
}

std::pair<std::string, std::string> split_key(const std::string& name) {
  const auto dot = name.find('.');
  return {name.substr(0, dot), name.substr(dot + 1)};
}

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void set_checked(const ConfigKey& k, PipelineConfig& cfg, const json& v) {
  try {
    // Integers accept only integral JSON numbers; reals accept both.
    const json current = k.get(cfg);
    if (current.is_boolean() && !v.is_boolean()) throw ConfigError("expected true/false");
    if (current.is_number_integer() && !v.is_number_integer()) throw ConfigError("expected an integer");
    if (current.is_number_float() && !v.is_number()) throw ConfigError("expected a number");
    if (current.is_number_unsigned() && v.is_number_integer() && v.get<std::int64_t>() < 0) {
      throw ConfigError("expected a non-negative integer");
    }
    k.set(cfg, v);
  } catch (const ConfigError& e) {
    throw ConfigError("config key '" + k.name + "': " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + k.name + "': " + e.what());
  }
}

}  // namespace

MergeConfig PipelineConfig::merge_config() const {
  return {merge_angle_deg * kDeg, merge_offset, merge_gap};
}

DoorThresholds PipelineConfig::door_thresholds() const {
  return {tau_theta_deg * kDeg, tau_d, association_radius, association_max_angle_deg * kDeg};
}

void PipelineConfig::validate() const {
  if (!(ingest.voxel > 0.0)) throw ConfigError("ingest.voxel must be > 0");
  if (!(ingest.max_range > 0.0)) throw ConfigError("ingest.max_range must be > 0");
  if (ingest.min_instance_points < 3) throw ConfigError("ingest.min_instance_points must be >= 3");
  if (!(ingest.min_observation_extent >= 0.0)) throw ConfigError("ingest.min_observation_extent must be >= 0");
  ransac.validate();
  merge_config().validate();
  if (!(tau_theta_deg > 0.0)) throw ConfigError("door.tau_theta_deg must be > 0");
  door_thresholds().validate();
  passage.validate();
  if (!(connectivity.probe_offset > 0.0)) throw ConfigError("connectivity.probe_offset must be > 0");
  if (!(connectivity.max_seed_distance > 0.0)) {
    throw ConfigError("connectivity.max_seed_distance must be > 0");
  }
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  for (const auto& k : config_keys()) {
    if (k.get(*this) != k.get(o)) return false;
  }
  return true;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

std::string config_help() {
  const PipelineConfig defaults;
  std::ostringstream os;
  for (const auto& k : config_keys()) {
    os << "  " << k.name << " = " << k.get(defaults).dump() << " [" << k.unit << "]  "
       << k.description << "\n";
  }
  return os.str();
}

json config_to_json(const PipelineConfig& cfg) {
  json doc = json::object();
  doc["schema"] = "config/1";
  for (const auto& k : config_keys()) {
    const auto [section, name] = split_key(k.name);
    doc[section][name] = k.get(cfg);
  }
  return doc;
}

PipelineConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be an object");
  PipelineConfig cfg;
  for (const auto& [section, body] : doc.items()) {
    if (section == "schema") {
      if (body != "config/1") throw ConfigError("unsupported config schema " + body.dump());
      continue;
    }
    if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [name, value] : body.items()) {
      const ConfigKey* k = find_key(section + "." + name);
      if (!k) throw ConfigError("unknown config key '" + section + "." + name + "'");
      set_checked(*k, cfg, value);
    }
  }
  return cfg;
}

PipelineConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(PipelineConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string name(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  const ConfigKey* k = find_key(name);
  if (!k) throw ConfigError("unknown config key '" + name + "'");
  json v;
  try {
    v = json::parse(text);
  } catch (const json::exception&) {
    throw ConfigError("config key '" + name + "': cannot parse value '" + text + "'");
  }
  set_checked(*k, cfg, v);
}

}  // namespace passmap
