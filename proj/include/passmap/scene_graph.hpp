#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "passmap/config.hpp"
#include "passmap/keyframe.hpp"
#include "passmap/passage.hpp"
#include "passmap/structural.hpp"

namespace passmap {

// Free-space region identified by seed points; supplied by the caller.
struct RoomRegion {
  EntityId id = 0;
  std::string label;
  std::vector<Point3> seeds;
};

struct ConnectivityEdge {
  EntityId passage_id = 0;
  EntityId room_a = 0;  // room_a < room_b
  EntityId room_b = 0;

  bool operator==(const ConnectivityEdge&) const = default;
};

struct TrajectorySample {
  std::int64_t kf_id = 0;
  double timestamp = 0.0;
  CameraPose pose;
};

// Outcome of the last gap validation, kept for inspection.
struct GapDecisionRecord {
  EntityId wall_id = 0;
  Point3 centroid = Point3::Zero();
  Vec2 extent{0.0, 0.0};
  bool touches_bottom = false;
  GapDecision decision = GapDecision::Reject;
};

struct SceneGraph {
  std::vector<Wall> walls;
  std::vector<Door> doors;
  std::vector<Passage> passages;
  std::vector<RoomRegion> rooms;
  std::vector<ConnectivityEdge> edges;
  PipelineConfig config;

  // Keyframe bookkeeping.
  std::vector<TrajectorySample> trajectory;
  std::string source_digest;  // FNV-1a over every processed keyframe, hex
  std::vector<GapDecisionRecord> gap_decisions;

  std::optional<std::int64_t> last_keyframe_id() const {
    if (trajectory.empty()) return std::nullopt;
    return trajectory.back().kf_id;
  }
};

// For each passage, probes centroid +/- probe_offset along the wall normal and
// assigns each probe to the room with the nearest seed (within
// max_seed_distance, ties to the lower room id). Probes that land in two
// different rooms yield an edge.
std::vector<ConnectivityEdge> derive_connectivity(const SceneGraph& graph,
                                                  const ConnectivityConfig& cfg = {});

// Room owning the nearest seed to `p`, if within max_distance.
std::optional<EntityId> room_at(const std::vector<RoomRegion>& rooms, const Point3& p,
                                double max_distance);

// Human-readable descriptions of every broken cross-reference or type
// invariant; empty for a consistent graph.
std::vector<std::string> integrity_violations(const SceneGraph& graph);

// Structural equality with float tolerance.
bool graphs_equal(const SceneGraph& a, const SceneGraph& b, double tol = 1e-9,
                  std::string* why = nullptr);

}  // namespace passmap
