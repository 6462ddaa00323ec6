#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "passmap/geometry.hpp"
#include "passmap/keyframe.hpp"
#include "passmap/structural.hpp"

namespace passmap {

enum class PassageKind : std::uint8_t { Doorway, Archway, Unknown };
enum class Provenance : std::uint8_t { Traversal, Gap, ClosedDoor };

std::string_view to_string(PassageKind k);
std::string_view to_string(Provenance p);
std::optional<PassageKind> passage_kind_from_string(std::string_view s);
std::optional<Provenance> provenance_from_string(std::string_view s);

// A traversable (or blocked) opening embedded in a wall.
struct Passage {
  EntityId id = 0;
  EntityId wall_id = 0;
  Point3 centroid = Point3::Zero();  // global frame
  Vec2 extent{0.0, 0.0};             // (width, height), m
  PassageKind kind = PassageKind::Unknown;
  Provenance provenance = Provenance::Traversal;
  std::optional<EntityId> associated_door;
  double confidence = 0.0;
};

struct TraversalEvent {
  EntityId wall_id = 0;
  std::int64_t kf_before = 0;
  std::int64_t kf_after = 0;
  double s_before = 0.0;
  double s_after = 0.0;
  Point3 crossing = Point3::Zero();
};

// Connected set of under-supported cells in a wall raster.
struct GapRegion {
  EntityId wall_id = 0;
  std::vector<std::pair<int, int>> cells;  // (column, row), sorted
  Vec2 centroid_2d{0.0, 0.0};              // wall in-plane (width, height) coordinates
  Vec2 extent_2d{0.0, 0.0};                // (width, height), m
  Point3 centroid = Point3::Zero();        // back-projected onto the wall plane
  bool touches_bottom = false;             // reaches the lowest occupied row
};

struct PassageConfig {
  double d_max = 1.0;          // m
  int window = 10;             // keyframes
  double cell_size = 0.10;     // m
  double tau_rho = 3.0;        // points per cell
  double min_gap_w = 0.6, max_gap_w = 2.5;  // m
  double min_gap_h = 1.6, max_gap_h = 3.0;  // m
  double door_proximity = 0.5;              // m
  double dedupe_radius = 0.5;               // m
  Vec2 default_extent{1.5, 2.0};            // m
  int gap_check_interval = 10;              // keyframes
  std::size_t min_gap_inliers = 100;

  // Evidence strength, used as fusion weights.
  double conf_closed_door = 0.9;
  double conf_gap = 0.7;
  double conf_traversal_door = 0.6;
  double conf_traversal = 0.5;

  void validate() const;
};

// Camera center of one keyframe; the only part of a keyframe the traversal
// strategy needs.
struct PoseSample {
  std::int64_t kf_id = 0;
  Point3 center = Point3::Zero();
};

std::vector<PoseSample> pose_samples(std::span<const KeyFrame> keyframes);

// Sign changes of the camera-to-wall signed distance between consecutive
// samples, both within d_max, with the crossing linearly interpolated. At most
// one event per `window` consecutive keyframes survives (smallest
// |s_t| + |s_t+1| first).
std::vector<TraversalEvent> detect_traversal_events(const Wall& wall,
                                                    std::span<const PoseSample> trajectory,
                                                    const PassageConfig& cfg);
std::vector<TraversalEvent> detect_traversal_events(const Wall& wall,
                                                    std::span<const KeyFrame> keyframes,
                                                    const PassageConfig& cfg);

// Rasterizes the wall inliers in its in-plane frame and returns enclosed (or
// floor-reaching) connected components of cells with fewer than tau_rho
// points. Near-horizontal planes yield no regions.
//
// Throws InsufficientCoverage when the wall has fewer than min_gap_inliers.
std::vector<GapRegion> detect_gap_regions(const Wall& wall, const PassageConfig& cfg);

enum class GapDecision : std::uint8_t { Accept, Reject, Defer };
std::string_view to_string(GapDecision d);

struct GapVerdict {
  GapDecision decision = GapDecision::Reject;
  PassageKind kind = PassageKind::Unknown;
  std::optional<EntityId> door;
};

// Width outside bounds rejects. Floor-reaching regions must also fit the
// height bounds and are accepted as Doorway (door nearby) or Unknown. Interior
// regions are accepted only with a nearby door and full extents; otherwise
// they are deferred as window-like.
GapVerdict validate_gap(const GapRegion& region, const std::vector<Door>& doors,
                        const PassageConfig& cfg);

// Throws InvalidState unless the door is Closed and supported by `wall`.
Passage passage_from_closed_door(const Door& door, const Wall& wall, const PassageConfig& cfg = {});

Passage classify_traversal_passage(const TraversalEvent& event, const std::vector<Door>& doors,
                                   const PassageConfig& cfg);

Passage passage_from_gap(const GapRegion& region, const GapVerdict& verdict,
                         const PassageConfig& cfg);

// Merges same-wall candidates closer than dedupe_radius until no such pair is
// left. Output is sorted by (wall, centroid) and ids are reassigned 0..n-1.
std::vector<Passage> fuse_passages(std::vector<Passage> candidates, const PassageConfig& cfg);

// Empty string when the passage satisfies its type invariants.
std::string passage_invariant_violation(const Passage& p, const std::vector<Wall>& walls);

}  // namespace passmap
