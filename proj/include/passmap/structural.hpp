#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <string_view>
#include <vector>

#include "passmap/geometry.hpp"

namespace passmap {

using EntityId = std::int64_t;

// Shared state of walls and doors: a plane refit over every inlier merged so
// far, plus the in-plane bounding box of those inliers.
struct PlanarEntity {
  EntityId id = 0;
  PlaneParams plane;
  PointCloud inliers;  // global frame, accumulated
  std::vector<std::int64_t> observing_keyframes;
  Box2 bbox;  // (width, height) coordinates of make_basis(plane)

  InPlaneBasis basis() const { return make_basis(plane); }
};

struct Wall : PlanarEntity {};

enum class DoorState : std::uint8_t { Unknown, Closed, Open };
std::string_view to_string(DoorState s);

struct Door : PlanarEntity {
  std::optional<EntityId> supporting_wall;
  DoorState state = DoorState::Unknown;
  Point3 centroid = Point3::Zero();  // center of bbox, on the door plane
};

struct DoorThresholds {
  double tau_theta = 10.0 * M_PI / 180.0;  // rad
  double tau_d = 0.08;                     // m
  double association_radius = 0.3;         // m
  double association_max_angle = 45.0 * M_PI / 180.0;

  void validate() const;
};

struct MergeConfig {
  double merge_angle = 5.0 * M_PI / 180.0;  // rad
  double merge_offset = 0.10;               // m
  double merge_gap = 0.3;                   // m, bbox separation

  void validate() const;
};

struct PlaneObservation {
  PlaneParams plane;
  PointCloud points;  // global frame
};

// Recomputes bbox (and, for doors, the centroid) from plane and inliers.
void refresh_geometry(PlanarEntity& e);
void refresh_geometry(Door& d);

// Index of the entity the observation merges into, if any: plane angle and
// offset gates plus bbox proximity. Smallest offset difference wins, then the
// lowest id.
template <typename Entity>
std::optional<std::size_t> find_merge_target(const std::vector<Entity>& entities,
                                             const PlaneObservation& obs, const MergeConfig& cfg);

// Merges the observation into a matching wall (refitting the plane over the
// union of inliers) or appends a new wall with the next free id.
std::vector<Wall> update_wall_map(std::vector<Wall> walls, const PlaneObservation& obs,
                                  std::int64_t kf_id, const MergeConfig& cfg = {});

// Same merge rule for door leaves. A merged door keeps its association state.
std::vector<Door> update_door_map(std::vector<Door> doors, const PlaneObservation& obs,
                                  std::int64_t kf_id, const MergeConfig& cfg = {});

// Merges entities that have grown into each other (same merge gates, bbox
// separation measured from the lower id). The lower id survives; a Closed door
// stays Closed. Returns (removed id, surviving id) pairs.
std::vector<std::pair<EntityId, EntityId>> coalesce_walls(std::vector<Wall>& walls, const MergeConfig& cfg = {});
std::vector<std::pair<EntityId, EntityId>> coalesce_doors(std::vector<Door>& doors, const MergeConfig& cfg = {});

// Closest wall (by |signed distance| of the door centroid) among walls within
// association_radius whose plane is within association_max_angle of the
// door's. Ties go to the lower wall id.
std::optional<EntityId> associate_door_to_wall(const Door& door, const std::vector<Wall>& walls,
                                               const DoorThresholds& th);

// Closed iff acos(|n_d . n_w|) < tau_theta and |d_d - d_w| < tau_d.
DoorState classify_door_state(const PlaneParams& door_plane, const PlaneParams& wall_plane,
                              const DoorThresholds& th);

// Re-associates and re-classifies every door that is not already Closed.
// Closed is latched for the lifetime of the map. Returns ids of doors that
// became Closed in this call.
std::vector<EntityId> update_door_states(std::vector<Door>& doors, const std::vector<Wall>& walls,
                                         const DoorThresholds& th);

const Wall* find_wall(const std::vector<Wall>& walls, EntityId id);
const Door* find_door(const std::vector<Door>& doors, EntityId id);

}  // namespace passmap
