#include "passmap/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace passmap {

std::optional<EntityId> room_at(const std::vector<RoomRegion>& rooms, const Point3& p,
                                double max_distance) {
  std::optional<EntityId> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& room : rooms) {
    for (const auto& s : room.seeds) {
      const double d = (s - p).norm();
      if (d < best_dist || (d == best_dist && best && room.id < *best)) {
        best_dist = d;
        best = room.id;
      }
    }
  }
  if (!best || !(best_dist <= max_distance)) return std::nullopt;
  return best;
}

std::vector<ConnectivityEdge> derive_connectivity(const SceneGraph& graph,
                                                  const ConnectivityConfig& cfg) {
  std::vector<ConnectivityEdge> edges;
  if (graph.rooms.empty()) return edges;
  for (const auto& p : graph.passages) {
    const Wall* wall = find_wall(graph.walls, p.wall_id);
    if (!wall) continue;
    const Eigen::Vector3d n = wall->plane.normal().vec();
    const auto a = room_at(graph.rooms, p.centroid + cfg.probe_offset * n, cfg.max_seed_distance);
    const auto b = room_at(graph.rooms, p.centroid - cfg.probe_offset * n, cfg.max_seed_distance);
    if (!a || !b || *a == *b) continue;
    edges.push_back({p.id, std::min(*a, *b), std::max(*a, *b)});
  }
  std::sort(edges.begin(), edges.end(), [](const ConnectivityEdge& x, const ConnectivityEdge& y) {
    return std::tie(x.passage_id, x.room_a, x.room_b) < std::tie(y.passage_id, y.room_a, y.room_b);
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::string> integrity_violations(const SceneGraph& g) {
  std::vector<std::string> out;
  auto check_unique = [&](const auto& items, const char* what) {
    std::set<EntityId> ids;
    for (const auto& it : items) {
      if (!ids.insert(it.id).second) out.push_back(std::string("duplicate ") + what + " id " + std::to_string(it.id));
    }
  };
  check_unique(g.walls, "wall");
  check_unique(g.doors, "door");
  check_unique(g.passages, "passage");
  check_unique(g.rooms, "room");

  for (const auto& d : g.doors) {
    if (d.supporting_wall && !find_wall(g.walls, *d.supporting_wall)) {
      out.push_back("door " + std::to_string(d.id) + " references missing wall " +
                    std::to_string(*d.supporting_wall));
    }
    if (d.state == DoorState::Closed && !d.supporting_wall) {
      out.push_back("closed door " + std::to_string(d.id) + " has no supporting wall");
    }
  }
  for (const auto& p : g.passages) {
    const std::string why = passage_invariant_violation(p, g.walls);
    if (!why.empty()) out.push_back("passage " + std::to_string(p.id) + ": " + why);
    if (p.associated_door && !find_door(g.doors, *p.associated_door)) {
      out.push_back("passage " + std::to_string(p.id) + " references missing door " +
                    std::to_string(*p.associated_door));
    }
  }
  for (const auto& r : g.rooms) {
    if (r.seeds.empty()) out.push_back("room " + std::to_string(r.id) + " has no seed points");
  }
  auto has_room = [&](EntityId id) {
    return std::any_of(g.rooms.begin(), g.rooms.end(), [&](const RoomRegion& r) { return r.id == id; });
  };
  for (const auto& e : g.edges) {
    const bool passage_ok = std::any_of(g.passages.begin(), g.passages.end(),
                                        [&](const Passage& p) { return p.id == e.passage_id; });
    if (!passage_ok) out.push_back("edge references missing passage " + std::to_string(e.passage_id));
    if (!has_room(e.room_a) || !has_room(e.room_b)) out.push_back("edge references a missing room");
    if (e.room_a == e.room_b) out.push_back("edge joins room " + std::to_string(e.room_a) + " to itself");
  }
  return out;
}

namespace {

struct Comparer {
  double tol;
  std::string* why;

  bool fail(const std::string& msg) const {
    if (why) *why = msg;
    return false;
  }
  bool num(double a, double b) const { return std::abs(a - b) <= tol || (a == b); }
  template <typename Derived>
  bool vec(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b) const {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (!num(a(i), b(i))) return false;
    }
    return true;
  }
  bool cloud(const PointCloud& a, const PointCloud& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!vec(a.points[i], b.points[i])) return false;
    }
    return true;
  }
  bool plane(const PlaneParams& a, const PlaneParams& b) const { return vec(a.coeffs(), b.coeffs()); }
  bool box(const Box2& a, const Box2& b) const {
    return a.valid == b.valid && vec(a.min, b.min) && vec(a.max, b.max);
  }
  bool entity(const PlanarEntity& a, const PlanarEntity& b) const {
    return a.id == b.id && plane(a.plane, b.plane) && cloud(a.inliers, b.inliers) &&
           a.observing_keyframes == b.observing_keyframes && box(a.bbox, b.bbox);
  }
};

}  // namespace

bool graphs_equal(const SceneGraph& a, const SceneGraph& b, double tol, std::string* why) {
  const Comparer c{tol, why};
  if (a.walls.size() != b.walls.size()) return c.fail("wall count differs");
  for (std::size_t i = 0; i < a.walls.size(); ++i) {
    if (!c.entity(a.walls[i], b.walls[i])) return c.fail("wall " + std::to_string(i) + " differs");
  }
  if (a.doors.size() != b.doors.size()) return c.fail("door count differs");
  for (std::size_t i = 0; i < a.doors.size(); ++i) {
    const auto& x = a.doors[i];
    const auto& y = b.doors[i];
    if (!c.entity(x, y) || x.supporting_wall != y.supporting_wall || x.state != y.state ||
        !c.vec(x.centroid, y.centroid)) {
      return c.fail("door " + std::to_string(i) + " differs");
    }
  }
  if (a.passages.size() != b.passages.size()) return c.fail("passage count differs");
  for (std::size_t i = 0; i < a.passages.size(); ++i) {
    const auto& x = a.passages[i];
    const auto& y = b.passages[i];
    if (x.id != y.id || x.wall_id != y.wall_id || !c.vec(x.centroid, y.centroid) ||
        !c.vec(x.extent, y.extent) || x.kind != y.kind || x.provenance != y.provenance ||
        x.associated_door != y.associated_door || !c.num(x.confidence, y.confidence)) {
      return c.fail("passage " + std::to_string(i) + " differs");
    }
  }
  if (a.rooms.size() != b.rooms.size()) return c.fail("room count differs");
  for (std::size_t i = 0; i < a.rooms.size(); ++i) {
    const auto& x = a.rooms[i];
    const auto& y = b.rooms[i];
    if (x.id != y.id || x.label != y.label || x.seeds.size() != y.seeds.size()) {
      return c.fail("room " + std::to_string(i) + " differs");
    }
    for (std::size_t k = 0; k < x.seeds.size(); ++k) {
      if (!c.vec(x.seeds[k], y.seeds[k])) return c.fail("room " + std::to_string(i) + " seeds differ");
    }
  }
  if (a.edges != b.edges) return c.fail("edges differ");
  if (!(a.config == b.config)) return c.fail("config differs");
  if (a.source_digest != b.source_digest) return c.fail("source digest differs");
  if (a.trajectory.size() != b.trajectory.size()) return c.fail("trajectory length differs");
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    const auto& x = a.trajectory[i];
    const auto& y = b.trajectory[i];
    if (x.kf_id != y.kf_id || !c.num(x.timestamp, y.timestamp) ||
        !c.vec(x.pose.rotation(), y.pose.rotation()) || !c.vec(x.pose.center(), y.pose.center())) {
      return c.fail("trajectory sample " + std::to_string(i) + " differs");
    }
  }
  if (a.gap_decisions.size() != b.gap_decisions.size()) return c.fail("gap decision count differs");
  for (std::size_t i = 0; i < a.gap_decisions.size(); ++i) {
    const auto& x = a.gap_decisions[i];
    const auto& y = b.gap_decisions[i];
    if (x.wall_id != y.wall_id || !c.vec(x.centroid, y.centroid) || !c.vec(x.extent, y.extent) ||
        x.touches_bottom != y.touches_bottom || x.decision != y.decision) {
      return c.fail("gap decision " + std::to_string(i) + " differs");
    }
  }
  return true;
}

}  // namespace passmap
