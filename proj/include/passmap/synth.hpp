#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "passmap/keyframe.hpp"
#include "passmap/passage.hpp"
#include "passmap/scene_graph.hpp"

namespace passmap {

inline constexpr const char* kSceneSchema = "scene/1";
inline constexpr const char* kTruthSchema = "truth/1";
inline constexpr const char* kRoomsSchema = "rooms/1";

// Leaf hanging in an opening. Closed leaves sit `proud` meters off the wall on
// `side`; open ones are swung 90 degrees about the hinge edge towards `side`.
struct DoorLeafSpec {
  DoorState state = DoorState::Closed;
  double proud = 0.03;  // m
  int side = 1;         // +1 or -1 along the wall normal
  bool hinge_at_start = true;
};

// Rectangular hole in a wall, placed by the distance of its center from the
// wall start and the height of its bottom edge above the wall base.
struct OpeningSpec {
  EntityId id = 0;
  double offset = 0.0;  // m along the wall
  double bottom = 0.0;  // m above base
  double width = 0.9;
  double height = 2.0;
  std::optional<DoorLeafSpec> door;
  std::optional<bool> passage;      // default: reaches the floor
  std::optional<PassageKind> kind;  // default: Doorway with a leaf, else Unknown

  bool is_passage() const { return passage.value_or(bottom <= 1e-9); }
  PassageKind passage_kind() const {
    return kind.value_or(door ? PassageKind::Doorway : PassageKind::Unknown);
  }
};

// Vertical rectangle above the floor segment start -> end. The normal is the
// segment direction rotated +90 degrees about z.
struct WallSpec {
  EntityId id = 0;
  Vec2 start{0.0, 0.0};
  Vec2 end{1.0, 0.0};
  double base = 0.0;
  double height = 2.5;
  std::vector<OpeningSpec> openings;

  double length() const { return (end - start).norm(); }
  Point3 direction() const;
  Point3 normal() const;
  Point3 at(double offset, double z) const;  // point on the wall surface
};

enum class ConfounderType : std::uint8_t { Cabinet, Poster };

// Object standing against a wall on `side`; it hides the wall behind its
// footprint. Posters are thin cabinets.
struct ConfounderSpec {
  ConfounderType type = ConfounderType::Cabinet;
  EntityId wall = 0;
  double offset = 0.0;  // m along the wall, footprint center
  double bottom = 0.0;
  double width = 1.0;
  double height = 1.0;
  double depth = 0.5;  // m, posters about 0.02
  int side = 1;
};

struct RoomSpec {
  EntityId id = 0;
  std::string label;
  Vec2 min{0.0, 0.0};
  Vec2 max{1.0, 1.0};
  double seed_spacing = 1.0;  // m, seeds on a grid inset by half a spacing
};

struct Waypoint {
  Point3 position = Point3::Zero();
  double yaw_deg = 0.0;  // heading about +z, 0 = +x
};

struct CameraSpec {
  double hfov_deg = 90.0;
  double vfov_deg = 70.0;
  double min_range = 0.3;
  double max_range = 8.0;
};

struct SceneSpec {
  std::vector<WallSpec> walls;
  std::vector<ConfounderSpec> confounders;
  std::vector<RoomSpec> rooms;
  std::vector<Waypoint> trajectory;
  CameraSpec camera;
  double keyframe_distance = 0.25;   // m between keyframes
  double keyframe_angle_deg = 15.0;  // yaw between keyframes
  double density = 150.0;            // points per m^2 per frame
  double noise_sigma = 0.01;         // m
  double label_noise = 0.01;         // fraction of points with a flipped class
  std::uint64_t rng_seed = 1;

  // Throws InvalidSpec with the reason.
  void validate() const;
};

struct TruthPassage {
  EntityId id = 0;
  EntityId wall_id = 0;
  Point3 centroid = Point3::Zero();
  Vec2 extent{0.0, 0.0};
  PassageKind kind = PassageKind::Unknown;
};

struct TruthDoor {
  EntityId id = 0;
  EntityId wall_id = 0;
  DoorState state = DoorState::Closed;
  Point3 centroid = Point3::Zero();
};

struct TruthWall {
  EntityId id = 0;
  PlaneParams plane;
};

struct GroundTruth {
  std::vector<TruthPassage> passages;
  std::vector<TruthDoor> doors;
  std::vector<RoomRegion> rooms;
  std::vector<TruthWall> walls;
};

struct SyntheticDataset {
  std::vector<KeyFrame> keyframes;
  GroundTruth truth;
};

// Deterministic for a fixed spec. Instance ids: walls 1.., door leaves 101..,
// confounders 201...
SyntheticDataset generate(const SceneSpec& spec);

// Camera poses alone, as generate would place them.
std::vector<CameraPose> trajectory_poses(const SceneSpec& spec);

// Three rooms in a row with two open doorways, one closed door on an exterior
// wall, a window, a cabinet and a floor poster.
SceneSpec office3_scene();

struct ScoreMetrics {
  std::size_t detected = 0;
  std::size_t truth = 0;
  std::size_t matched = 0;
  double precision = 1.0;  // 1 when nothing was detected
  double recall = 1.0;     // 1 when there is nothing to find
  double mean_centroid_error = 0.0;
  double max_centroid_error = 0.0;
  double kind_accuracy = 1.0;  // over matched pairs, 1 when none matched
};

// Optimal one-to-one matching within match_radius (same rule as prior
// validation). Throws ConfigError unless match_radius > 0.
ScoreMetrics score(const std::vector<Passage>& detected, const GroundTruth& truth, double match_radius = 0.5);
std::string format_metrics(const ScoreMetrics& m);

std::string save_scene_spec(const SceneSpec& spec);
SceneSpec load_scene_spec(const std::string& document);
SceneSpec read_scene_spec(const std::filesystem::path& path);

std::string save_truth(const GroundTruth& truth);
GroundTruth load_truth(const std::string& document);
GroundTruth read_truth(const std::filesystem::path& path);

std::string save_rooms(const std::vector<RoomRegion>& rooms);
std::vector<RoomRegion> load_rooms(const std::string& document);
std::vector<RoomRegion> read_rooms(const std::filesystem::path& path);

// Writes the dataset (ingest layout), truth.json and rooms.json under `dir`.
void write_synthetic(const std::filesystem::path& dir, const SyntheticDataset& data);

}  // namespace passmap
