#include "passmap/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <future>
#include <thread>

#include "passmap/downsample.hpp"
#include "passmap/errors.hpp"
#include "passmap/ransac.hpp"

namespace passmap {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

class Fnv1a {
 public:
  explicit Fnv1a(std::uint64_t state) : h_(state) {}

  template <typename T>
  void add(const T& v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (unsigned char b : bytes) {
      h_ ^= b;
      h_ *= kFnvPrime;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_;
};

std::uint64_t parse_digest(const std::string& hex) {
  if (hex.empty()) return kFnvOffset;
  return std::stoull(hex, nullptr, 16);
}

std::string format_digest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fold_keyframe(const std::string& digest, const KeyFrame& kf) {
  Fnv1a h(parse_digest(digest));
  h.add(kf.id);
  h.add(kf.timestamp);
  for (int i = 0; i < 9; ++i) h.add(kf.pose.rotation().data()[i]);
  for (int i = 0; i < 3; ++i) h.add(kf.pose.center()[i]);
  h.add(static_cast<std::uint64_t>(kf.cloud.size()));
  for (std::size_t i = 0; i < kf.cloud.size(); ++i) {
    const auto& p = kf.cloud.points.points[i];
    h.add(p.x());
    h.add(p.y());
    h.add(p.z());
    if (i < kf.cloud.labels.size()) {
      h.add(static_cast<std::uint8_t>(kf.cloud.labels[i].class_id));
      h.add(kf.cloud.labels[i].instance_id);
    }
  }
  return format_digest(h.value());
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t base, std::int64_t kf_id, SemanticClass cls,
                            std::uint32_t instance) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ static_cast<std::uint64_t>(kf_id));
  s = splitmix64(s ^ static_cast<std::uint64_t>(cls));
  return splitmix64(s ^ instance);
}

// Downsampled, RANSAC-validated plane of one semantic instance, or nullopt
// with a warning.
std::optional<PlaneObservation> observe_instance(const KeyFrame& kf, SemanticClass cls,
                                                 const InstanceSubset& subset,
                                                 const PipelineConfig& cfg,
                                                 std::vector<std::string>& warnings) {
  const std::string tag = "frame " + std::to_string(kf.id) + " " + std::string(to_string(cls)) +
                          " instance " + std::to_string(subset.instance_id) + ": ";
  PointCloud global;
  global.points.reserve(subset.points.size());
  for (const auto& p : subset.points.points) global.points.push_back(kf.pose.to_global(p));
  const PointCloud filtered =
      downsample_and_range_filter(global, cfg.ingest.voxel, cfg.ingest.max_range, kf.pose.center());
  if (filtered.size() < cfg.ingest.min_instance_points) {
    warnings.push_back(tag + "too few points after filtering (" + std::to_string(filtered.size()) + ")");
    return std::nullopt;
  }
  RansacConfig rc = cfg.ransac;
  rc.rng_seed = instance_seed(cfg.ransac.rng_seed, kf.id, cls, subset.instance_id);
  PlaneFit fit;
  try {
    fit = fit_plane_ransac(filtered, rc);
  } catch (const Error& e) {
    warnings.push_back(tag + e.what());
    return std::nullopt;
  }
  PlaneObservation obs;
  obs.plane = fit.plane;
  obs.points.points.reserve(fit.inliers.size());
  for (auto i : fit.inliers) obs.points.points.push_back(filtered.points[i]);

  if (is_near_horizontal_plane(obs.plane)) {
    warnings.push_back(tag + "plane is horizontal, not a vertical structure");
    return std::nullopt;
  }
  const Vec2 extent = projected_bounds(obs.points.points, make_basis(obs.plane)).extent();
  if (extent.minCoeff() < cfg.ingest.min_observation_extent) {
    warnings.push_back(tag + "observation too narrow to constrain a plane");
    return std::nullopt;
  }
  return obs;
}

std::vector<GapRegion> gaps_for_wall(const Wall& wall, const PassageConfig& cfg) {
  try {
    return detect_gap_regions(wall, cfg);
  } catch (const InsufficientCoverage&) {
    return {};  // deferred until the wall has more support
  }
}

}  // namespace

SceneGraph make_graph(const PipelineConfig& cfg) {
  cfg.validate();
  SceneGraph g;
  g.config = cfg;
  g.source_digest = format_digest(kFnvOffset);
  return g;
}

void refresh_passages(SceneGraph& graph, const RuntimeOptions& rt, std::vector<std::string>* warnings) {
  const PipelineConfig& cfg = graph.config;
  std::vector<Passage> candidates;

  for (const auto& d : graph.doors) {
    if (d.state != DoorState::Closed || !d.supporting_wall) continue;
    const Wall* w = find_wall(graph.walls, *d.supporting_wall);
    if (!w) continue;
    candidates.push_back(passage_from_closed_door(d, *w, cfg.passage));
  }

  if (cfg.strategy.traversal) {
    std::vector<PoseSample> samples;
    samples.reserve(graph.trajectory.size());
    for (const auto& t : graph.trajectory) samples.push_back({t.kf_id, t.pose.center()});
    for (const auto& w : graph.walls) {
      if (is_near_horizontal_plane(w.plane)) continue;
      for (const auto& e : detect_traversal_events(w, std::span<const PoseSample>(samples), cfg.passage)) {
        candidates.push_back(classify_traversal_passage(e, graph.doors, cfg.passage));
      }
    }
  }

  graph.gap_decisions.clear();
  if (cfg.strategy.gap) {
    std::vector<std::vector<GapRegion>> per_wall(graph.walls.size());
    const unsigned threads = std::max(1u, std::min<unsigned>(rt.threads, graph.walls.size()));
    if (threads <= 1) {
      for (std::size_t i = 0; i < graph.walls.size(); ++i) per_wall[i] = gaps_for_wall(graph.walls[i], cfg.passage);
    } else {
      std::vector<std::future<void>> jobs;
      for (unsigned t = 0; t < threads; ++t) {
        jobs.push_back(std::async(std::launch::async, [&, t] {
          for (std::size_t i = t; i < graph.walls.size(); i += threads) {
            per_wall[i] = gaps_for_wall(graph.walls[i], cfg.passage);
          }
        }));
      }
      for (auto& j : jobs) j.get();
    }
    for (const auto& regions : per_wall) {
      for (const auto& r : regions) {
        const GapVerdict v = validate_gap(r, graph.doors, cfg.passage);
        graph.gap_decisions.push_back({r.wall_id, r.centroid, r.extent_2d, r.touches_bottom, v.decision});
        if (v.decision == GapDecision::Accept) candidates.push_back(passage_from_gap(r, v, cfg.passage));
      }
    }
  }

  std::vector<Passage> fused = fuse_passages(std::move(candidates), cfg.passage);
  graph.passages.clear();
  for (auto& p : fused) {
    const std::string why = passage_invariant_violation(p, graph.walls);
    if (!why.empty()) {
      if (warnings) warnings->push_back("dropped passage on wall " + std::to_string(p.wall_id) + ": " + why);
      continue;
    }
    graph.passages.push_back(p);
  }
  for (std::size_t i = 0; i < graph.passages.size(); ++i) graph.passages[i].id = static_cast<EntityId>(i);
  graph.edges = derive_connectivity(graph, cfg.connectivity);
}

SceneGraph process_keyframe(SceneGraph graph, const KeyFrame& kf, KeyframeReport* report,
                            const RuntimeOptions& rt) {
  if (const auto last = graph.last_keyframe_id(); last && kf.id <= *last) {
    throw InvalidState("keyframe " + std::to_string(kf.id) + " does not follow processed keyframe " +
                       std::to_string(*last));
  }
  KeyframeReport local;
  KeyframeReport& rep = report ? *report : local;
  rep = KeyframeReport{};
  rep.kf_id = kf.id;

  const PipelineConfig& cfg = graph.config;
  graph.trajectory.push_back({kf.id, kf.timestamp, kf.pose});
  graph.source_digest = fold_keyframe(graph.source_digest, kf);

  if (!kf.cloud.consistent()) {
    rep.warnings.push_back("frame " + std::to_string(kf.id) + ": label count does not match point count");
  } else {
    const MergeConfig merge = cfg.merge_config();
    for (const auto& subset : extract_class_subset(kf, SemanticClass::Wall, cfg.ingest.min_instance_points)) {
      if (auto obs = observe_instance(kf, SemanticClass::Wall, subset, cfg, rep.warnings)) {
        graph.walls = update_wall_map(std::move(graph.walls), *obs, kf.id, merge);
        ++rep.walls_observed;
      }
    }
    for (const auto& subset : extract_class_subset(kf, SemanticClass::Door, cfg.ingest.min_instance_points)) {
      if (auto obs = observe_instance(kf, SemanticClass::Door, subset, cfg, rep.warnings)) {
        graph.doors = update_door_map(std::move(graph.doors), *obs, kf.id, merge);
        ++rep.doors_observed;
      }
    }
  }

  for (const auto& [removed, kept] : coalesce_walls(graph.walls, cfg.merge_config())) {
    for (auto& d : graph.doors) {
      if (d.supporting_wall == removed) d.supporting_wall = kept;
    }
    for (auto& p : graph.passages) {
      if (p.wall_id == removed) p.wall_id = kept;
    }
    for (auto& r : graph.gap_decisions) {
      if (r.wall_id == removed) r.wall_id = kept;
    }
  }
  for (const auto& [removed, kept] : coalesce_doors(graph.doors, cfg.merge_config())) {
    for (auto& p : graph.passages) {
      if (p.associated_door == removed) p.associated_door = kept;
    }
  }

  const auto newly_closed = update_door_states(graph.doors, graph.walls, cfg.door_thresholds());
  const bool periodic = graph.trajectory.size() % static_cast<std::size_t>(cfg.passage.gap_check_interval) == 0;
  if (periodic || !newly_closed.empty()) {
    refresh_passages(graph, rt, &rep.warnings);
    rep.refreshed = true;
  }
  return graph;
}

SceneGraph run_pipeline(std::span<const KeyFrame> keyframes, const PipelineConfig& cfg,
                        const std::vector<RoomRegion>& rooms, const RuntimeOptions& rt) {
  SceneGraph g = make_graph(cfg);
  g.rooms = rooms;
  for (const auto& kf : keyframes) g = process_keyframe(std::move(g), kf, nullptr, rt);
  refresh_passages(g, rt);
  return g;
}

LabeledPointCloud export_map_cloud(const SceneGraph& graph) {
  LabeledPointCloud out;
  auto append = [&](const PlanarEntity& e, SemanticClass cls) {
    for (const auto& p : e.inliers.points) {
      out.points.points.push_back(p);
      out.labels.push_back({cls, static_cast<std::uint32_t>(e.id + 1)});
    }
  };
  for (const auto& w : graph.walls) append(w, SemanticClass::Wall);
  for (const auto& d : graph.doors) append(d, SemanticClass::Door);
  return out;
}

}  // namespace passmap
