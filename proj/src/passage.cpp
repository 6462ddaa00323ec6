#include "passmap/passage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "passmap/errors.hpp"

namespace passmap {

namespace {

int kind_rank(PassageKind k) {
  switch (k) {
    case PassageKind::Doorway:
      return 2;
    case PassageKind::Archway:
      return 1;
    case PassageKind::Unknown:
      return 0;
  }
  return 0;
}

int provenance_rank(Provenance p) { return static_cast<int>(p); }

const Door* nearest_door(const Point3& at, const std::vector<Door>& doors, double radius) {
  const Door* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& d : doors) {
    const double dist = (d.centroid - at).norm();
    if (!(dist <= radius)) continue;
    if (dist < best_dist || (dist == best_dist && d.id < best->id)) {
      best = &d;
      best_dist = dist;
    }
  }
  return best;
}

bool point_less(const Point3& a, const Point3& b) {
  return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
}

Passage merge_pair(const Passage& a, const Passage& b) {
  Passage m;
  m.wall_id = a.wall_id;
  m.kind = kind_rank(a.kind) >= kind_rank(b.kind) ? a.kind : b.kind;
  const double w = a.confidence + b.confidence;
  m.centroid = w > 0.0 ? Point3((a.confidence * a.centroid + b.confidence * b.centroid) / w)
                       : Point3(0.5 * (a.centroid + b.centroid));
  // Geometry from the strongest source; equal sources defer to confidence.
  const bool a_leads =
      provenance_rank(a.provenance) > provenance_rank(b.provenance) ||
      (a.provenance == b.provenance && a.confidence >= b.confidence);
  const Passage& lead = a_leads ? a : b;
  const Passage& other = a_leads ? b : a;
  m.extent = lead.extent;
  m.provenance = lead.provenance;
  m.associated_door = lead.associated_door ? lead.associated_door : other.associated_door;
  m.confidence = 1.0 - (1.0 - a.confidence) * (1.0 - b.confidence);
  return m;
}

}  // namespace

std::string_view to_string(PassageKind k) {
  switch (k) {
    case PassageKind::Doorway:
      return "Doorway";
    case PassageKind::Archway:
      return "Archway";
    case PassageKind::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Traversal:
      return "Traversal";
    case Provenance::Gap:
      return "Gap";
    case Provenance::ClosedDoor:
      return "ClosedDoor";
  }
  return "Traversal";
}

std::string_view to_string(GapDecision d) {
  switch (d) {
    case GapDecision::Accept:
      return "Accept";
    case GapDecision::Reject:
      return "Reject";
    case GapDecision::Defer:
      return "Defer";
  }
  return "Reject";
}

std::optional<PassageKind> passage_kind_from_string(std::string_view s) {
  for (auto k : {PassageKind::Doorway, PassageKind::Archway, PassageKind::Unknown}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::Traversal, Provenance::Gap, Provenance::ClosedDoor}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

void PassageConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("passage.") + name + " must be > 0");
  };
  positive(d_max, "d_max");
  positive(cell_size, "cell_size");
  positive(tau_rho, "tau_rho");
  positive(min_gap_w, "min_gap_w");
  positive(min_gap_h, "min_gap_h");
  positive(door_proximity, "door_proximity");
  positive(dedupe_radius, "dedupe_radius");
  positive(default_extent.x(), "default_extent width");
  positive(default_extent.y(), "default_extent height");
  if (window < 1) throw ConfigError("passage.window must be >= 1");
  if (gap_check_interval < 1) throw ConfigError("passage.gap_check_interval must be >= 1");
  if (!(min_gap_w < max_gap_w)) throw ConfigError("passage.min_gap_w must be < max_gap_w");
  if (!(min_gap_h < max_gap_h)) throw ConfigError("passage.min_gap_h must be < max_gap_h");
  for (double c : {conf_closed_door, conf_gap, conf_traversal_door, conf_traversal}) {
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("passage confidences must be in (0, 1)");
  }
}

std::vector<PoseSample> pose_samples(std::span<const KeyFrame> keyframes) {
  std::vector<PoseSample> out;
  out.reserve(keyframes.size());
  for (const auto& kf : keyframes) out.push_back({kf.id, kf.pose.center()});
  return out;
}

std::vector<TraversalEvent> detect_traversal_events(const Wall& wall,
                                                    std::span<const PoseSample> trajectory,
                                                    const PassageConfig& cfg) {
  struct Candidate {
    TraversalEvent event;
    std::size_t index;  // position of the pair in the trajectory
    double score;
  };
  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t + 1 < trajectory.size(); ++t) {
    const Point3& c0 = trajectory[t].center;
    const Point3& c1 = trajectory[t + 1].center;
    const double s0 = signed_distance(c0, wall.plane);
    const double s1 = signed_distance(c1, wall.plane);
    if (!(std::abs(s0) < cfg.d_max) || !(std::abs(s1) < cfg.d_max)) continue;
    if (!(s0 * s1 < 0.0)) continue;
    const double lambda = std::abs(s0) / (std::abs(s0) + std::abs(s1));
    TraversalEvent e;
    e.wall_id = wall.id;
    e.kf_before = trajectory[t].kf_id;
    e.kf_after = trajectory[t + 1].kf_id;
    e.s_before = s0;
    e.s_after = s1;
    e.crossing = c0 + lambda * (c1 - c0);
    candidates.push_back({e, t, std::abs(s0) + std::abs(s1)});
  }

  // Greedy local-consistency filter; ordering uses only quantities that are
  // invariant under trajectory reversal.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].score != candidates[b].score) return candidates[a].score < candidates[b].score;
    return point_less(candidates[a].event.crossing, candidates[b].event.crossing);
  });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      const std::size_t a = candidates[i].index;
      const std::size_t b = candidates[k].index;
      return (a > b ? a - b : b - a) < static_cast<std::size_t>(cfg.window);
    });
    if (!clash) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end(),
            [&](std::size_t a, std::size_t b) { return candidates[a].index < candidates[b].index; });
  std::vector<TraversalEvent> out;
  for (std::size_t k : kept) out.push_back(candidates[k].event);
  return out;
}

std::vector<TraversalEvent> detect_traversal_events(const Wall& wall,
                                                    std::span<const KeyFrame> keyframes,
                                                    const PassageConfig& cfg) {
  const auto samples = pose_samples(keyframes);
  return detect_traversal_events(wall, std::span<const PoseSample>(samples), cfg);
}

std::vector<GapRegion> detect_gap_regions(const Wall& wall, const PassageConfig& cfg) {
  if (wall.inliers.size() < cfg.min_gap_inliers) {
    throw InsufficientCoverage("wall " + std::to_string(wall.id) + " has " +
                               std::to_string(wall.inliers.size()) + " inliers, need " +
                               std::to_string(cfg.min_gap_inliers));
  }
  if (is_near_horizontal_plane(wall.plane)) return {};

  const InPlaneBasis basis = wall.basis();
  std::vector<Vec2> uv;
  uv.reserve(wall.inliers.size());
  Box2 box;
  for (const auto& p : wall.inliers.points) {
    uv.push_back(basis.to_2d(p));
    box.expand(uv.back());
  }
  const double cs = cfg.cell_size;
  const Vec2 size = box.extent();
  const int cols = std::max(1, static_cast<int>(std::ceil(size.x() / cs)));
  const int rows = std::max(1, static_cast<int>(std::ceil(size.y() / cs)));
  std::vector<int> count(static_cast<std::size_t>(cols) * rows, 0);
  auto at = [cols](int c, int r) { return static_cast<std::size_t>(r) * cols + c; };
  for (const auto& q : uv) {
    const int c = std::clamp(static_cast<int>(std::floor((q.x() - box.min.x()) / cs)), 0, cols - 1);
    const int r = std::clamp(static_cast<int>(std::floor((q.y() - box.min.y()) / cs)), 0, rows - 1);
    ++count[at(c, r)];
  }
  auto occupied = [&](int c, int r) { return count[at(c, r)] >= cfg.tau_rho; };

  // Trim the raster to the occupied extent; sparse fringes are not openings.
  int c_lo = cols, c_hi = -1, r_lo = rows, r_hi = -1;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!occupied(c, r)) continue;
      c_lo = std::min(c_lo, c);
      c_hi = std::max(c_hi, c);
      r_lo = std::min(r_lo, r);
      r_hi = std::max(r_hi, r);
    }
  }
  if (c_hi < 0) return {};

  std::vector<char> visited(count.size(), 0);
  std::vector<GapRegion> regions;
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      if (visited[at(c, r)] || occupied(c, r)) continue;
      std::vector<std::pair<int, int>> cells;
      std::vector<std::pair<int, int>> stack{{c, r}};
      visited[at(c, r)] = 1;
      bool touches_side = false;
      bool touches_bottom = false;
      while (!stack.empty()) {
        const auto [cc, rr] = stack.back();
        stack.pop_back();
        cells.emplace_back(cc, rr);
        if (cc == c_lo || cc == c_hi || rr == r_hi) touches_side = true;
        if (rr == r_lo) touches_bottom = true;
        constexpr int dc[4] = {1, -1, 0, 0};
        constexpr int dr[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nc = cc + dc[k];
          const int nr = rr + dr[k];
          if (nc < c_lo || nc > c_hi || nr < r_lo || nr > r_hi) continue;
          if (visited[at(nc, nr)] || occupied(nc, nr)) continue;
          visited[at(nc, nr)] = 1;
          stack.emplace_back(nc, nr);
        }
      }
      if (touches_side) continue;
      std::sort(cells.begin(), cells.end());
      int mc_lo = cells.front().first, mc_hi = mc_lo, mr_lo = cells.front().second, mr_hi = mr_lo;
      for (const auto& [cc, rr] : cells) {
        mc_lo = std::min(mc_lo, cc);
        mc_hi = std::max(mc_hi, cc);
        mr_lo = std::min(mr_lo, rr);
        mr_hi = std::max(mr_hi, rr);
      }
      GapRegion g;
      g.wall_id = wall.id;
      g.cells = std::move(cells);
      const Vec2 lo(box.min.x() + mc_lo * cs, box.min.y() + mr_lo * cs);
      const Vec2 hi(box.min.x() + (mc_hi + 1) * cs, box.min.y() + (mr_hi + 1) * cs);
      g.centroid_2d = 0.5 * (lo + hi);
      g.extent_2d = hi - lo;
      g.centroid = basis.to_3d(g.centroid_2d);
      g.touches_bottom = touches_bottom;
      regions.push_back(std::move(g));
    }
  }
  return regions;
}

GapVerdict validate_gap(const GapRegion& region, const std::vector<Door>& doors,
                        const PassageConfig& cfg) {
  const double w = region.extent_2d.x();
  const double h = region.extent_2d.y();
  GapVerdict v;
  if (w < cfg.min_gap_w || w > cfg.max_gap_w || h > cfg.max_gap_h) return v;  // Reject
  const bool height_ok = h >= cfg.min_gap_h;
  const Door* door = nearest_door(region.centroid, doors, cfg.door_proximity);
  if (region.touches_bottom) {
    if (!height_ok) return v;
    v.decision = GapDecision::Accept;
    v.kind = door ? PassageKind::Doorway : PassageKind::Unknown;
    if (door) v.door = door->id;
    return v;
  }
  if (height_ok && door) {
    v.decision = GapDecision::Accept;
    v.kind = PassageKind::Doorway;
    v.door = door->id;
    return v;
  }
  v.decision = GapDecision::Defer;
  return v;
}

Passage passage_from_closed_door(const Door& door, const Wall& wall, const PassageConfig& cfg) {
  if (door.state != DoorState::Closed) {
    throw InvalidState("door " + std::to_string(door.id) + " is " + std::string(to_string(door.state)) +
                       ", not Closed");
  }
  if (!door.supporting_wall || *door.supporting_wall != wall.id) {
    throw InvalidState("door " + std::to_string(door.id) + " is not supported by wall " +
                       std::to_string(wall.id));
  }
  Passage p;
  p.wall_id = wall.id;
  p.centroid = wall.plane.project(door.centroid);
  p.extent = projected_bounds(door.inliers.points, wall.basis()).extent();
  p.kind = PassageKind::Doorway;
  p.provenance = Provenance::ClosedDoor;
  p.associated_door = door.id;
  p.confidence = cfg.conf_closed_door;
  return p;
}

Passage classify_traversal_passage(const TraversalEvent& event, const std::vector<Door>& doors,
                                   const PassageConfig& cfg) {
  Passage p;
  p.wall_id = event.wall_id;
  p.centroid = event.crossing;
  p.provenance = Provenance::Traversal;
  if (const Door* door = nearest_door(event.crossing, doors, cfg.door_proximity)) {
    p.kind = PassageKind::Doorway;
    p.associated_door = door->id;
    p.extent = door->bbox.extent();
    p.confidence = cfg.conf_traversal_door;
  } else {
    p.kind = PassageKind::Unknown;
    p.extent = cfg.default_extent;
    p.confidence = cfg.conf_traversal;
  }
  return p;
}

Passage passage_from_gap(const GapRegion& region, const GapVerdict& verdict,
                         const PassageConfig& cfg) {
  if (verdict.decision != GapDecision::Accept) {
    throw InvalidState("only accepted gap regions become passages");
  }
  Passage p;
  p.wall_id = region.wall_id;
  p.centroid = region.centroid;
  p.extent = region.extent_2d;
  p.kind = verdict.kind;
  p.provenance = Provenance::Gap;
  p.associated_door = verdict.door;
  p.confidence = cfg.conf_gap;
  return p;
}

std::vector<Passage> fuse_passages(std::vector<Passage> candidates, const PassageConfig& cfg) {
  auto canonical_less = [](const Passage& a, const Passage& b) {
    if (a.wall_id != b.wall_id) return a.wall_id < b.wall_id;
    if (a.centroid != b.centroid) return point_less(a.centroid, b.centroid);
    if (a.provenance != b.provenance) return a.provenance < b.provenance;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.confidence != b.confidence) return a.confidence < b.confidence;
    if (a.extent != b.extent) return std::tie(a.extent.x(), a.extent.y()) < std::tie(b.extent.x(), b.extent.y());
    return a.associated_door.value_or(-1) < b.associated_door.value_or(-1);
  };
  std::sort(candidates.begin(), candidates.end(), canonical_less);

  const double r = cfg.dedupe_radius;
  while (true) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        if (candidates[i].wall_id != candidates[j].wall_id) continue;
        const double d = (candidates[i].centroid - candidates[j].centroid).norm();
        if (d <= r && d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (!std::isfinite(best)) break;
    Passage merged = merge_pair(candidates[bi], candidates[bj]);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(bj));
    candidates[bi] = merged;
    std::sort(candidates.begin(), candidates.end(), canonical_less);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].id = static_cast<EntityId>(i);
  return candidates;
}

std::string passage_invariant_violation(const Passage& p, const std::vector<Wall>& walls) {
  if (!(p.extent.x() > 0.0) || !(p.extent.y() > 0.0)) return "non-positive extent";
  if (!p.centroid.allFinite()) return "non-finite centroid";
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) return "confidence outside [0, 1]";
  const Wall* w = find_wall(walls, p.wall_id);
  if (!w) return "wall " + std::to_string(p.wall_id) + " does not exist";
  if (!(std::abs(signed_distance(p.centroid, w->plane)) <= 0.5)) return "centroid farther than 0.5 m from its wall";
  if (p.kind == PassageKind::Doorway && !p.associated_door && p.provenance != Provenance::ClosedDoor) {
    return "doorway without door or closed-door provenance";
  }
  return {};
}

}  // namespace passmap
