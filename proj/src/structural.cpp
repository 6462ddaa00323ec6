#include "passmap/structural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "passmap/errors.hpp"
#include "passmap/ransac.hpp"

namespace passmap {

namespace {

// Offset difference with the second plane's orientation aligned to the first.
double offset_difference(const PlaneParams& a, const PlaneParams& b) {
  const double sign = a.normal().dot(b.normal().vec()) < 0.0 ? -1.0 : 1.0;
  return std::abs(a.offset() - sign * b.offset());
}

template <typename Entity>
void merge_into(Entity& e, const PlaneObservation& obs, std::optional<std::int64_t> kf_id,
                const MergeConfig& cfg) {
  auto& pts = e.inliers.points;
  pts.insert(pts.end(), obs.points.points.begin(), obs.points.points.end());
  try {
    e.plane = fit_plane_least_squares(pts);
  } catch (const DegenerateInput&) {
    // Keep the previous plane; the union is still consistent with it.
  }
  std::erase_if(pts, [&](const Point3& p) {
    return std::abs(signed_distance(p, e.plane)) > cfg.merge_offset;
  });
  if (kf_id && std::find(e.observing_keyframes.begin(), e.observing_keyframes.end(), *kf_id) ==
                   e.observing_keyframes.end()) {
    e.observing_keyframes.push_back(*kf_id);
  }
  refresh_geometry(e);
}

// Box of `other` expressed in the basis of `e`, from its four corners.
Box2 box_in_basis(const PlanarEntity& other, const InPlaneBasis& basis) {
  Box2 out;
  if (!other.bbox.valid) return out;
  const InPlaneBasis ob = other.basis();
  for (const Vec2& c : {other.bbox.min, other.bbox.max, Vec2(other.bbox.min.x(), other.bbox.max.y()),
                        Vec2(other.bbox.max.x(), other.bbox.min.y())}) {
    out.expand(basis.to_2d(ob.to_3d(c)));
  }
  return out;
}

void absorb_state(PlanarEntity&, const PlanarEntity&) {}

void absorb_state(Door& into, const Door& from) {
  if (into.state != DoorState::Closed && from.state == DoorState::Closed) {
    into.state = DoorState::Closed;
    into.supporting_wall = from.supporting_wall;
  }
}

template <typename Entity>
std::vector<std::pair<EntityId, EntityId>> coalesce(std::vector<Entity>& entities, const MergeConfig& cfg) {
  std::vector<std::pair<EntityId, EntityId>> merged;
  std::sort(entities.begin(), entities.end(), [](const Entity& a, const Entity& b) { return a.id < b.id; });
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < entities.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < entities.size() && !changed; ++j) {
        Entity& a = entities[i];
        const Entity& b = entities[j];
        if (!(plane_angle(a.plane, b.plane) < cfg.merge_angle)) continue;
        if (!(offset_difference(a.plane, b.plane) < cfg.merge_offset)) continue;
        if (!(a.bbox.separation(box_in_basis(b, a.basis())) <= cfg.merge_gap)) continue;
        PlaneObservation obs{b.plane, b.inliers};
        merge_into(a, obs, std::nullopt, cfg);
        for (auto k : b.observing_keyframes) a.observing_keyframes.push_back(k);
        std::sort(a.observing_keyframes.begin(), a.observing_keyframes.end());
        a.observing_keyframes.erase(std::unique(a.observing_keyframes.begin(), a.observing_keyframes.end()),
                                    a.observing_keyframes.end());
        absorb_state(a, b);
        refresh_geometry(a);
        merged.emplace_back(b.id, a.id);
        entities.erase(entities.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
    }
  }
  return merged;
}

template <typename Entity>
EntityId next_id(const std::vector<Entity>& entities) {
  EntityId id = 0;
  for (const auto& e : entities) id = std::max(id, e.id + 1);
  return id;
}

template <typename Entity>
std::vector<Entity> update_map(std::vector<Entity> entities, const PlaneObservation& obs,
                               std::int64_t kf_id, const MergeConfig& cfg) {
  if (auto target = find_merge_target(entities, obs, cfg)) {
    merge_into(entities[*target], obs, kf_id, cfg);
    return entities;
  }
  Entity e;
  e.id = next_id(entities);
  e.plane = obs.plane;
  e.inliers = obs.points;
  e.observing_keyframes.push_back(kf_id);
  refresh_geometry(e);
  entities.push_back(std::move(e));
  return entities;
}

}  // namespace

std::string_view to_string(DoorState s) {
  switch (s) {
    case DoorState::Unknown:
      return "Unknown";
    case DoorState::Closed:
      return "Closed";
    case DoorState::Open:
      return "Open";
  }
  return "Unknown";
}

void DoorThresholds::validate() const {
  if (!(tau_theta > 0.0)) throw ConfigError("door.tau_theta must be > 0");
  if (!(tau_d > 0.0)) throw ConfigError("door.tau_d must be > 0");
  if (!(association_radius > 0.0)) throw ConfigError("door.association_radius must be > 0");
  if (!(association_max_angle > 0.0)) throw ConfigError("door.association_max_angle must be > 0");
}

void MergeConfig::validate() const {
  if (!(merge_angle > 0.0)) throw ConfigError("merge.angle must be > 0");
  if (!(merge_offset > 0.0)) throw ConfigError("merge.offset must be > 0");
  if (!(merge_gap >= 0.0)) throw ConfigError("merge.gap must be >= 0");
}

void refresh_geometry(PlanarEntity& e) { e.bbox = projected_bounds(e.inliers.points, e.basis()); }

void refresh_geometry(Door& d) {
  const InPlaneBasis b = d.basis();
  d.bbox = projected_bounds(d.inliers.points, b);
  d.centroid = d.bbox.valid ? b.to_3d(d.bbox.center()) : d.plane.origin_point();
}

template <typename Entity>
std::optional<std::size_t> find_merge_target(const std::vector<Entity>& entities,
                                             const PlaneObservation& obs, const MergeConfig& cfg) {
  std::optional<std::size_t> best;
  double best_offset = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const auto& e = entities[i];
    if (!(plane_angle(e.plane, obs.plane) < cfg.merge_angle)) continue;
    const double dd = offset_difference(e.plane, obs.plane);
    if (!(dd < cfg.merge_offset)) continue;
    const Box2 obs_box = projected_bounds(obs.points.points, e.basis());
    if (!(e.bbox.separation(obs_box) <= cfg.merge_gap)) continue;
    if (dd < best_offset || (dd == best_offset && best && e.id < entities[*best].id)) {
      best = i;
      best_offset = dd;
    }
  }
  return best;
}

template std::optional<std::size_t> find_merge_target<Wall>(const std::vector<Wall>&,
                                                            const PlaneObservation&,
                                                            const MergeConfig&);
template std::optional<std::size_t> find_merge_target<Door>(const std::vector<Door>&,
                                                            const PlaneObservation&,
                                                            const MergeConfig&);

std::vector<Wall> update_wall_map(std::vector<Wall> walls, const PlaneObservation& obs,
                                  std::int64_t kf_id, const MergeConfig& cfg) {
  return update_map(std::move(walls), obs, kf_id, cfg);
}

std::vector<Door> update_door_map(std::vector<Door> doors, const PlaneObservation& obs,
                                  std::int64_t kf_id, const MergeConfig& cfg) {
  return update_map(std::move(doors), obs, kf_id, cfg);
}

std::vector<std::pair<EntityId, EntityId>> coalesce_walls(std::vector<Wall>& walls, const MergeConfig& cfg) {
  return coalesce(walls, cfg);
}

std::vector<std::pair<EntityId, EntityId>> coalesce_doors(std::vector<Door>& doors, const MergeConfig& cfg) {
  return coalesce(doors, cfg);
}

std::optional<EntityId> associate_door_to_wall(const Door& door, const std::vector<Wall>& walls,
                                               const DoorThresholds& th) {
  std::optional<EntityId> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& w : walls) {
    if (!(plane_angle(door.plane, w.plane) < th.association_max_angle)) continue;
    const double dist = std::abs(signed_distance(door.centroid, w.plane));
    if (!(dist < th.association_radius)) continue;
    if (dist < best_dist || (dist == best_dist && best && w.id < *best)) {
      best = w.id;
      best_dist = dist;
    }
  }
  return best;
}

DoorState classify_door_state(const PlaneParams& door_plane, const PlaneParams& wall_plane,
                              const DoorThresholds& th) {
  // Offsets are only comparable once the normals agree, so the angle gate
  // is evaluated first.
  if (!(plane_angle(door_plane, wall_plane) < th.tau_theta)) return DoorState::Open;
  if (!(std::abs(door_plane.offset() - wall_plane.offset()) < th.tau_d)) return DoorState::Open;
  return DoorState::Closed;
}

std::vector<EntityId> update_door_states(std::vector<Door>& doors, const std::vector<Wall>& walls,
                                         const DoorThresholds& th) {
  std::vector<EntityId> newly_closed;
  for (auto& d : doors) {
    if (d.state == DoorState::Closed) continue;
    d.supporting_wall = associate_door_to_wall(d, walls, th);
    if (!d.supporting_wall) {
      d.state = DoorState::Unknown;
      continue;
    }
    d.state = classify_door_state(d.plane, find_wall(walls, *d.supporting_wall)->plane, th);
    if (d.state == DoorState::Closed) newly_closed.push_back(d.id);
  }
  return newly_closed;
}

const Wall* find_wall(const std::vector<Wall>& walls, EntityId id) {
  for (const auto& w : walls) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

const Door* find_door(const std::vector<Door>& doors, EntityId id) {
  for (const auto& d : doors) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

}  // namespace passmap
