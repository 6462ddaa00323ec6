#include "passmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "passmap/bim_prior.hpp"
#include "passmap/dataset_io.hpp"

namespace passmap {

using nlohmann::json;
using namespace jsonu;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = M_PI / 180.0;
constexpr std::uint32_t kWallInstanceBase = 1;
constexpr std::uint32_t kDoorInstanceBase = 101;
constexpr std::uint32_t kConfounderInstanceBase = 201;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hole in a surface's (a, b) parameter rectangle. side != 0 limits it to
// cameras on that side of the surface normal.
struct Hole {
  Box2 box;
  int side = 0;
};

struct Surface {
  Point3 origin;
  Point3 a;  // unit
  Point3 b;  // unit
  double a_len = 0.0;
  double b_len = 0.0;
  Point3 normal;  // a x b
  std::vector<Hole> holes;
  SemanticLabel label;
};

Surface make_surface(const Point3& origin, const Point3& a, double a_len, const Point3& b, double b_len,
                     SemanticLabel label) {
  Surface s;
  s.origin = origin;
  s.a = a.normalized();
  s.b = b.normalized();
  s.a_len = a_len;
  s.b_len = b_len;
  s.normal = s.a.cross(s.b).normalized();
  s.label = label;
  return s;
}

Box2 rect(double a0, double a1, double b0, double b1) {
  Box2 r;
  r.expand({a0, b0});
  r.expand({a1, b1});
  return r;
}

bool inside(const Box2& r, double u, double v) {
  return u > r.min.x() && u < r.max.x() && v > r.min.y() && v < r.max.y();
}

std::vector<Surface> build_surfaces(const SceneSpec& spec) {
  std::vector<Surface> out;
  std::uint32_t door_index = 0;
  for (std::size_t wi = 0; wi < spec.walls.size(); ++wi) {
    const WallSpec& w = spec.walls[wi];
    Surface s = make_surface(w.at(0.0, w.base), w.direction(), w.length(), Point3::UnitZ(), w.height,
                             {SemanticClass::Wall, kWallInstanceBase + static_cast<std::uint32_t>(wi)});
    for (const auto& o : w.openings) {
      s.holes.push_back({rect(o.offset - o.width / 2, o.offset + o.width / 2, o.bottom, o.bottom + o.height), 0});
    }
    for (const auto& c : spec.confounders) {
      if (c.wall != w.id) continue;
      // Normal of the wall surface is direction x z, the opposite of the wall
      // normal, so the camera side flips.
      s.holes.push_back({rect(c.offset - c.width / 2, c.offset + c.width / 2, c.bottom, c.bottom + c.height), -c.side});
    }
    out.push_back(std::move(s));

    for (const auto& o : w.openings) {
      if (!o.door) continue;
      const DoorLeafSpec& d = *o.door;
      const SemanticLabel label{SemanticClass::Door, kDoorInstanceBase + door_index++};
      const double z0 = w.base + o.bottom;
      if (d.state == DoorState::Open) {
        const double hinge = d.hinge_at_start ? o.offset - o.width / 2 : o.offset + o.width / 2;
        out.push_back(make_surface(w.at(hinge, z0), d.side * w.normal(), o.width, Point3::UnitZ(), o.height, label));
      } else {
        out.push_back(make_surface(w.at(o.offset - o.width / 2, z0) + d.proud * d.side * w.normal(), w.direction(),
                                   o.width, Point3::UnitZ(), o.height, label));
      }
    }
  }
  for (std::size_t ci = 0; ci < spec.confounders.size(); ++ci) {
    const ConfounderSpec& c = spec.confounders[ci];
    const WallSpec& w = *std::find_if(spec.walls.begin(), spec.walls.end(), [&](const WallSpec& x) { return x.id == c.wall; });
    const SemanticLabel label{SemanticClass::Other, kConfounderInstanceBase + static_cast<std::uint32_t>(ci)};
    const Point3 n = c.side * w.normal();
    const double z0 = w.base + c.bottom;
    const Point3 left = w.at(c.offset - c.width / 2, z0);
    const Point3 right = w.at(c.offset + c.width / 2, z0);
    out.push_back(make_surface(left + c.depth * n, w.direction(), c.width, Point3::UnitZ(), c.height, label));
    out.push_back(make_surface(left, n, c.depth, Point3::UnitZ(), c.height, label));
    out.push_back(make_surface(right, n, c.depth, Point3::UnitZ(), c.height, label));
    out.push_back(make_surface(left + c.height * Point3::UnitZ(), w.direction(), c.width, n, c.depth, label));
  }
  return out;
}

CameraPose pose_from_yaw(const Point3& position, double yaw_deg) {
  const double y = yaw_deg * kDeg;
  const Point3 forward(std::cos(y), std::sin(y), 0.0);
  const Point3 down(0.0, 0.0, -1.0);
  const Point3 right = down.cross(forward);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return CameraPose(r, position);
}

SemanticClass flip_class(SemanticClass c, std::mt19937_64& rng) {
  static constexpr SemanticClass all[] = {SemanticClass::Other, SemanticClass::Wall, SemanticClass::Door,
                                          SemanticClass::Ground};
  std::uniform_int_distribution<int> pick(0, 2);
  int k = pick(rng);
  for (auto cand : all) {
    if (cand == c) continue;
    if (k-- == 0) return cand;
  }
  return c;
}

LabeledPointCloud render_frame(const std::vector<Surface>& surfaces, const SceneSpec& spec, const CameraPose& pose,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double spacing = 1.0 / std::sqrt(spec.density);
  const double tan_h = std::tan(spec.camera.hfov_deg * kDeg / 2);
  const double tan_v = std::tan(spec.camera.vfov_deg * kDeg / 2);

  LabeledPointCloud cloud;
  for (const auto& s : surfaces) {
    const int side = (pose.center() - s.origin).dot(s.normal) >= 0.0 ? 1 : -1;
    const int na = static_cast<int>(std::ceil(s.a_len / spacing));
    const int nb = static_cast<int>(std::ceil(s.b_len / spacing));
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < nb; ++j) {
        const double u = (i + unit(rng)) * spacing;
        const double v = (j + unit(rng)) * spacing;
        if (u > s.a_len || v > s.b_len) continue;
        bool hidden = false;
        for (const auto& h : s.holes) {
          if ((h.side == 0 || h.side == side) && inside(h.box, u, v)) {
            hidden = true;
            break;
          }
        }
        if (hidden) continue;
        const Point3 cam = pose.to_camera(s.origin + u * s.a + v * s.b);
        const double range = cam.norm();
        if (cam.z() <= 0.0 || range < spec.camera.min_range || range > spec.camera.max_range) continue;
        if (std::abs(cam.x()) > tan_h * cam.z() || std::abs(cam.y()) > tan_v * cam.z()) continue;
        Point3 noisy = cam;
        if (spec.noise_sigma > 0.0) {
          noisy += spec.noise_sigma * Point3(noise(rng), noise(rng), noise(rng));
        }
        SemanticLabel label = s.label;
        if (spec.label_noise > 0.0 && unit(rng) < spec.label_noise) label.class_id = flip_class(label.class_id, rng);
        cloud.points.points.push_back(noisy);
        cloud.labels.push_back(label);
      }
    }
  }
  return cloud;
}

std::vector<Point3> room_seeds(const RoomSpec& r) {
  std::vector<Point3> seeds;
  const double sp = r.seed_spacing;
  for (double x = r.min.x() + sp / 2; x <= r.max.x() - sp / 2 + 1e-9; x += sp) {
    for (double y = r.min.y() + sp / 2; y <= r.max.y() - sp / 2 + 1e-9; y += sp) seeds.emplace_back(x, y, 1.0);
  }
  if (seeds.empty()) seeds.emplace_back(0.5 * (r.min.x() + r.max.x()), 0.5 * (r.min.y() + r.max.y()), 1.0);
  return seeds;
}

void require(bool ok, const std::string& why) {
  if (!ok) throw InvalidSpec(why);
}

bool finite(double v) { return std::isfinite(v); }

// ---- JSON helpers ----

json room_json(const RoomRegion& r) {
  json seeds = json::array();
  for (const auto& s : r.seeds) seeds.push_back(vec_json(s));
  return {{"id", r.id}, {"label", r.label}, {"seeds", std::move(seeds)}};
}

RoomRegion read_room(const json& j, const std::string& path) {
  Object o(j, path);
  RoomRegion r;
  r.id = as_int(o.req("id"), o.at("id"));
  r.label = as_string(o.req("label"), o.at("label"));
  for (const auto& s : as_array(o.req("seeds"), o.at("seeds"))) r.seeds.push_back(as_vec3(s, o.at("seeds")));
  o.finish();
  if (r.seeds.empty()) throw SchemaError(o.at("seeds") + ": a room needs at least one seed");
  return r;
}

std::vector<RoomRegion> read_room_list(const json& list, const std::string& path) {
  std::vector<RoomRegion> rooms;
  std::set<EntityId> ids;
  as_array(list, path);
  for (std::size_t i = 0; i < list.size(); ++i) {
    rooms.push_back(read_room(list[i], path + "[" + std::to_string(i) + "]"));
    if (!ids.insert(rooms.back().id).second) throw SchemaError(path + ": duplicate room id");
  }
  return rooms;
}

PassageKind read_kind(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  const auto k = passage_kind_from_string(s);
  if (!k) throw SchemaError(path + ": unknown kind '" + s + "'");
  return *k;
}

DoorState read_door_state(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  for (auto st : {DoorState::Unknown, DoorState::Closed, DoorState::Open}) {
    if (to_string(st) == s) return st;
  }
  throw SchemaError(path + ": unknown door state '" + s + "'");
}

int read_side(const json& v, const std::string& path) {
  const auto s = as_int(v, path);
  if (s != 1 && s != -1) throw SchemaError(path + ": side must be 1 or -1");
  return static_cast<int>(s);
}

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(std::string("cannot open ") + what + " file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_doc(const std::string& document, const char* what) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what) + " document is not valid JSON: " + e.what());
  }
}

template <typename Fn>
auto with_path(const fs::path& path, Fn fn) {
  try {
    return fn();
  } catch (const SchemaVersionMismatch&) {
    throw;
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

Point3 WallSpec::direction() const {
  const Vec2 d = (end - start).normalized();
  return {d.x(), d.y(), 0.0};
}

Point3 WallSpec::normal() const {
  const Point3 d = direction();
  return {-d.y(), d.x(), 0.0};
}

Point3 WallSpec::at(double offset, double z) const {
  return Point3(start.x(), start.y(), 0.0) + offset * direction() + Point3(0.0, 0.0, z);
}

void SceneSpec::validate() const {
  require(!walls.empty(), "scene has no walls");
  require(density > 0.0 && finite(density), "density must be > 0");
  require(noise_sigma >= 0.0 && finite(noise_sigma), "noise_sigma must be >= 0");
  require(label_noise >= 0.0 && label_noise <= 1.0, "label_noise must be in [0, 1]");
  require(keyframe_distance > 0.0 && finite(keyframe_distance), "keyframe_distance must be > 0");
  require(keyframe_angle_deg > 0.0 && finite(keyframe_angle_deg), "keyframe_angle_deg must be > 0");
  require(camera.hfov_deg > 0.0 && camera.hfov_deg < 180.0, "camera.hfov_deg must be in (0, 180)");
  require(camera.vfov_deg > 0.0 && camera.vfov_deg < 180.0, "camera.vfov_deg must be in (0, 180)");
  require(camera.min_range >= 0.0 && camera.max_range > camera.min_range, "camera ranges must satisfy 0 <= min < max");

  std::set<EntityId> wall_ids, opening_ids;
  for (const auto& w : walls) {
    const std::string tag = "wall " + std::to_string(w.id) + ": ";
    require(wall_ids.insert(w.id).second, tag + "duplicate id");
    require(finite(w.start.x()) && finite(w.start.y()) && finite(w.end.x()) && finite(w.end.y()) && finite(w.base),
            tag + "coordinates must be finite");
    require(w.length() > 1e-6, tag + "zero length");
    require(w.height > 0.0 && finite(w.height), tag + "height must be > 0");
    std::vector<Box2> boxes;
    for (const auto& o : w.openings) {
      const std::string otag = tag + "opening " + std::to_string(o.id) + ": ";
      require(opening_ids.insert(o.id).second, otag + "duplicate opening id");
      require(o.width > 0.0 && o.height > 0.0, otag + "size must be > 0");
      require(o.offset - o.width / 2 >= -1e-9 && o.offset + o.width / 2 <= w.length() + 1e-9 && o.bottom >= -1e-9 &&
                  o.bottom + o.height <= w.height + 1e-9,
              otag + "lies outside the wall rectangle");
      const Box2 b = rect(o.offset - o.width / 2, o.offset + o.width / 2, o.bottom, o.bottom + o.height);
      for (const auto& other : boxes) {
        const bool overlap = b.min.x() < other.max.x() && other.min.x() < b.max.x() && b.min.y() < other.max.y() &&
                             other.min.y() < b.max.y();
        require(!overlap, otag + "overlaps another opening");
      }
      boxes.push_back(b);
      if (o.door) {
        require(o.door->side == 1 || o.door->side == -1, otag + "door side must be 1 or -1");
        require(o.door->state != DoorState::Unknown, otag + "door state must be Closed or Open");
        require(o.door->proud >= 0.0 && o.door->proud < 0.5, otag + "door proud must be in [0, 0.5)");
      }
    }
  }
  for (const auto& c : confounders) {
    const auto w = std::find_if(walls.begin(), walls.end(), [&](const WallSpec& x) { return x.id == c.wall; });
    require(w != walls.end(), "confounder references missing wall " + std::to_string(c.wall));
    require(c.width > 0.0 && c.height > 0.0 && c.depth > 0.0, "confounder size must be > 0");
    require(c.side == 1 || c.side == -1, "confounder side must be 1 or -1");
    require(c.offset - c.width / 2 >= -1e-9 && c.offset + c.width / 2 <= w->length() + 1e-9 && c.bottom >= -1e-9 &&
                c.bottom + c.height <= w->height + 1e-9,
            "confounder footprint lies outside wall " + std::to_string(c.wall));
  }
  std::set<EntityId> room_ids;
  for (const auto& r : rooms) {
    require(room_ids.insert(r.id).second, "duplicate room id " + std::to_string(r.id));
    require(r.max.x() > r.min.x() && r.max.y() > r.min.y(), "room " + std::to_string(r.id) + " is empty");
    require(r.seed_spacing > 0.0, "room " + std::to_string(r.id) + " seed_spacing must be > 0");
  }
  require(!trajectory.empty(), "trajectory has no waypoints");
  for (const auto& wp : trajectory) {
    require(all_finite(wp.position) && finite(wp.yaw_deg), "trajectory waypoints must be finite");
  }
}

std::vector<CameraPose> trajectory_poses(const SceneSpec& spec) {
  std::vector<CameraPose> poses;
  const auto& wps = spec.trajectory;
  poses.push_back(pose_from_yaw(wps.front().position, wps.front().yaw_deg));
  for (std::size_t i = 1; i < wps.size(); ++i) {
    const Waypoint& a = wps[i - 1];
    const Waypoint& b = wps[i];
    const double dist = (b.position - a.position).norm();
    const double turn = std::abs(b.yaw_deg - a.yaw_deg);
    const int steps = std::max({1, static_cast<int>(std::ceil(dist / spec.keyframe_distance - 1e-9)),
                                static_cast<int>(std::ceil(turn / spec.keyframe_angle_deg - 1e-9))});
    for (int k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      poses.push_back(pose_from_yaw(a.position + t * (b.position - a.position), a.yaw_deg + t * (b.yaw_deg - a.yaw_deg)));
    }
  }
  return poses;
}

SyntheticDataset generate(const SceneSpec& spec) {
  spec.validate();
  SyntheticDataset out;
  const auto surfaces = build_surfaces(spec);
  const auto poses = trajectory_poses(spec);
  out.keyframes.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    KeyFrame kf;
    kf.id = static_cast<std::int64_t>(i);
    kf.timestamp = 0.1 * static_cast<double>(i);
    kf.pose = poses[i];
    kf.cloud = render_frame(surfaces, spec, poses[i], splitmix64(spec.rng_seed ^ splitmix64(i)));
    out.keyframes.push_back(std::move(kf));
  }

  GroundTruth& t = out.truth;
  EntityId door_id = 0;
  for (const auto& w : spec.walls) {
    t.walls.push_back({w.id, PlaneParams::through(w.at(0.0, w.base), w.normal())});
    for (const auto& o : w.openings) {
      const Point3 center = w.at(o.offset, w.base + o.bottom + o.height / 2);
      if (o.is_passage()) t.passages.push_back({o.id, w.id, center, {o.width, o.height}, o.passage_kind()});
      if (o.door) {
        Point3 leaf = center + o.door->proud * o.door->side * w.normal();
        if (o.door->state == DoorState::Open) {
          const double hinge = o.door->hinge_at_start ? o.offset - o.width / 2 : o.offset + o.width / 2;
          leaf = w.at(hinge, w.base + o.bottom + o.height / 2) + (o.width / 2) * o.door->side * w.normal();
        }
        t.doors.push_back({door_id++, w.id, o.door->state, leaf});
      }
    }
  }
  for (const auto& r : spec.rooms) t.rooms.push_back({r.id, r.label, room_seeds(r)});
  return out;
}

SceneSpec office3_scene() {
  SceneSpec s;
  s.rng_seed = 20240611;
  s.density = 80.0;
  const double h = 2.5;

  WallSpec south{0, {0.0, 0.0}, {12.0, 0.0}, 0.0, h, {}};
  OpeningSpec front_door{0, 6.0, 0.0, 0.9, 2.0, DoorLeafSpec{DoorState::Closed, 0.03, 1, true}, {}, {}};
  south.openings.push_back(front_door);

  WallSpec east{1, {12.0, 0.0}, {12.0, 5.0}, 0.0, h, {}};
  WallSpec north{2, {12.0, 5.0}, {0.0, 5.0}, 0.0, h, {}};
  WallSpec west{3, {0.0, 5.0}, {0.0, 0.0}, 0.0, h, {}};
  west.openings.push_back({1, 2.5, 1.0, 1.0, 1.0, std::nullopt, {}, {}});  // window

  WallSpec ab{4, {4.0, 0.0}, {4.0, 5.0}, 0.0, h, {}};
  ab.openings.push_back({2, 2.5, 0.0, 0.9, 2.0, std::nullopt, {}, {}});
  WallSpec bc{5, {8.0, 0.0}, {8.0, 5.0}, 0.0, h, {}};
  bc.openings.push_back({3, 3.0, 0.0, 0.9, 2.0, DoorLeafSpec{DoorState::Open, 0.0, -1, true}, {}, {}});

  s.walls = {south, east, north, west, ab, bc};

  // Cabinet against the north wall of the first room, poster leaning on the
  // east wall of the last one.
  s.confounders.push_back({ConfounderType::Cabinet, 2, 12.0 - 1.9, 0.0, 1.8, 1.0, 0.5, 1});
  s.confounders.push_back({ConfounderType::Poster, 1, 2.5, 0.0, 0.6, 1.2, 0.02, 1});

  s.rooms = {{0, "A", {0.0, 0.0}, {4.0, 5.0}, 1.0}, {1, "B", {4.0, 0.0}, {8.0, 5.0}, 1.0},
             {2, "C", {8.0, 0.0}, {12.0, 5.0}, 1.0}};

  const double z = 1.1;
  auto wp = [&](double x, double y, double yaw) { return Waypoint{Point3(x, y, z), yaw}; };
  s.trajectory = {
      wp(1.5, 1.5, 0.0),   wp(1.5, 1.5, 360.0),  wp(2.5, 3.5, 360.0), wp(2.5, 3.5, 720.0),
      wp(3.0, 2.5, 720.0), wp(5.0, 2.5, 720.0),  wp(6.0, 2.0, 720.0), wp(6.0, 2.0, 1080.0),
      wp(6.5, 3.0, 1080.0), wp(7.0, 3.0, 1080.0), wp(9.0, 3.0, 1080.0), wp(10.0, 2.5, 1080.0),
      wp(10.0, 2.5, 1440.0), wp(10.5, 1.5, 1440.0), wp(10.5, 1.5, 1800.0),
  };
  return s;
}

ScoreMetrics score(const std::vector<Passage>& detected, const GroundTruth& truth, double match_radius) {
  if (!(match_radius > 0.0)) throw ConfigError("match_radius must be > 0");
  std::vector<Passage> det = detected;
  std::vector<TruthPassage> tru = truth.passages;
  std::sort(det.begin(), det.end(), [](const Passage& a, const Passage& b) { return a.id < b.id; });
  std::sort(tru.begin(), tru.end(), [](const TruthPassage& a, const TruthPassage& b) { return a.id < b.id; });
  std::vector<Point3> dc, tc;
  for (const auto& d : det) dc.push_back(d.centroid);
  for (const auto& t : tru) tc.push_back(t.centroid);

  ScoreMetrics m;
  m.detected = det.size();
  m.truth = tru.size();
  std::size_t kinds_ok = 0;
  double sum = 0.0;
  for (const auto& [i, j] : match_centroids(dc, tc, match_radius)) {
    ++m.matched;
    const double e = (dc[i] - tc[j]).norm();
    sum += e;
    m.max_centroid_error = std::max(m.max_centroid_error, e);
    if (det[i].kind == tru[j].kind) ++kinds_ok;
  }
  if (m.detected > 0) m.precision = static_cast<double>(m.matched) / static_cast<double>(m.detected);
  if (m.truth > 0) m.recall = static_cast<double>(m.matched) / static_cast<double>(m.truth);
  if (m.matched > 0) {
    m.mean_centroid_error = sum / static_cast<double>(m.matched);
    m.kind_accuracy = static_cast<double>(kinds_ok) / static_cast<double>(m.matched);
  }
  return m;
}

std::string format_metrics(const ScoreMetrics& m) {
  std::ostringstream out;
  out << "detected=" << m.detected << "\n"
      << "truth=" << m.truth << "\n"
      << "matched=" << m.matched << "\n"
      << "precision=" << format_double(m.precision) << "\n"
      << "recall=" << format_double(m.recall) << "\n"
      << "mean_centroid_error=" << format_double(m.mean_centroid_error) << "\n"
      << "max_centroid_error=" << format_double(m.max_centroid_error) << "\n"
      << "kind_accuracy=" << format_double(m.kind_accuracy) << "\n";
  return out.str();
}

// ---- scene/1 ----

std::string save_scene_spec(const SceneSpec& s) {
  json walls = json::array();
  for (const auto& w : s.walls) {
    json openings = json::array();
    for (const auto& o : w.openings) {
      json j{{"id", o.id}, {"offset", o.offset}, {"bottom", o.bottom}, {"width", o.width}, {"height", o.height}};
      if (o.door) {
        j["door"] = {{"state", std::string(to_string(o.door->state))},
                     {"proud", o.door->proud},
                     {"side", o.door->side},
                     {"hinge", o.door->hinge_at_start ? "start" : "end"}};
      }
      if (o.passage) j["passage"] = *o.passage;
      if (o.kind) j["kind"] = std::string(to_string(*o.kind));
      openings.push_back(std::move(j));
    }
    walls.push_back({{"id", w.id},
                     {"start", vec_json(w.start)},
                     {"end", vec_json(w.end)},
                     {"base", w.base},
                     {"height", w.height},
                     {"openings", std::move(openings)}});
  }
  json conf = json::array();
  for (const auto& c : s.confounders) {
    conf.push_back({{"type", c.type == ConfounderType::Cabinet ? "cabinet" : "poster"},
                    {"wall", c.wall},
                    {"offset", c.offset},
                    {"bottom", c.bottom},
                    {"width", c.width},
                    {"height", c.height},
                    {"depth", c.depth},
                    {"side", c.side}});
  }
  json rooms = json::array();
  for (const auto& r : s.rooms) {
    rooms.push_back({{"id", r.id}, {"label", r.label}, {"min", vec_json(r.min)}, {"max", vec_json(r.max)},
                     {"seed_spacing", r.seed_spacing}});
  }
  json traj = json::array();
  for (const auto& w : s.trajectory) traj.push_back({{"position", vec_json(w.position)}, {"yaw_deg", w.yaw_deg}});
  json doc{{"schema", kSceneSchema},
           {"rng_seed", s.rng_seed},
           {"density", s.density},
           {"noise_sigma", s.noise_sigma},
           {"label_noise", s.label_noise},
           {"keyframe_distance", s.keyframe_distance},
           {"keyframe_angle_deg", s.keyframe_angle_deg},
           {"camera",
            {{"hfov_deg", s.camera.hfov_deg},
             {"vfov_deg", s.camera.vfov_deg},
             {"min_range", s.camera.min_range},
             {"max_range", s.camera.max_range}}},
           {"walls", std::move(walls)},
           {"confounders", std::move(conf)},
           {"rooms", std::move(rooms)},
           {"trajectory", std::move(traj)}};
  return doc.dump(1) + "\n";
}

SceneSpec load_scene_spec(const std::string& document) {
  const json doc = parse_doc(document, "scene");
  check_schema(doc, kSceneSchema);
  Object root(doc, "scene");
  root.req("schema");
  SceneSpec s;
  {
    const json& seed = root.req("rng_seed");
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw SchemaError(root.at("rng_seed") + ": expected a non-negative integer");
    }
    s.rng_seed = seed.get<std::uint64_t>();
  }
  s.density = as_double(root.req("density"), root.at("density"));
  s.noise_sigma = as_double(root.req("noise_sigma"), root.at("noise_sigma"));
  s.label_noise = as_double(root.req("label_noise"), root.at("label_noise"));
  if (auto* v = root.opt("keyframe_distance")) s.keyframe_distance = as_double(*v, root.at("keyframe_distance"));
  if (auto* v = root.opt("keyframe_angle_deg")) s.keyframe_angle_deg = as_double(*v, root.at("keyframe_angle_deg"));
  if (auto* v = root.opt("camera")) {
    Object c(*v, root.at("camera"));
    if (auto* x = c.opt("hfov_deg")) s.camera.hfov_deg = as_double(*x, c.at("hfov_deg"));
    if (auto* x = c.opt("vfov_deg")) s.camera.vfov_deg = as_double(*x, c.at("vfov_deg"));
    if (auto* x = c.opt("min_range")) s.camera.min_range = as_double(*x, c.at("min_range"));
    if (auto* x = c.opt("max_range")) s.camera.max_range = as_double(*x, c.at("max_range"));
    c.finish();
  }

  const json& walls = as_array(root.req("walls"), root.at("walls"));
  for (std::size_t i = 0; i < walls.size(); ++i) {
    Object o(walls[i], "walls[" + std::to_string(i) + "]");
    WallSpec w;
    w.id = as_int(o.req("id"), o.at("id"));
    w.start = as_vec2(o.req("start"), o.at("start"));
    w.end = as_vec2(o.req("end"), o.at("end"));
    if (auto* v = o.opt("base")) w.base = as_double(*v, o.at("base"));
    w.height = as_double(o.req("height"), o.at("height"));
    if (auto* list = o.opt("openings")) {
      as_array(*list, o.at("openings"));
      for (std::size_t k = 0; k < list->size(); ++k) {
        Object q((*list)[k], o.at("openings") + "[" + std::to_string(k) + "]");
        OpeningSpec op;
        op.id = as_int(q.req("id"), q.at("id"));
        op.offset = as_double(q.req("offset"), q.at("offset"));
        if (auto* v = q.opt("bottom")) op.bottom = as_double(*v, q.at("bottom"));
        op.width = as_double(q.req("width"), q.at("width"));
        op.height = as_double(q.req("height"), q.at("height"));
        if (auto* d = q.opt("door")) {
          Object dj(*d, q.at("door"));
          DoorLeafSpec leaf;
          leaf.state = read_door_state(dj.req("state"), dj.at("state"));
          if (auto* v = dj.opt("proud")) leaf.proud = as_double(*v, dj.at("proud"));
          if (auto* v = dj.opt("side")) leaf.side = read_side(*v, dj.at("side"));
          if (auto* v = dj.opt("hinge")) {
            const std::string hinge = as_string(*v, dj.at("hinge"));
            if (hinge != "start" && hinge != "end") throw SchemaError(dj.at("hinge") + ": expected 'start' or 'end'");
            leaf.hinge_at_start = hinge == "start";
          }
          dj.finish();
          op.door = leaf;
        }
        if (auto* v = q.opt("passage")) op.passage = as_bool(*v, q.at("passage"));
        if (auto* v = q.opt("kind")) op.kind = read_kind(*v, q.at("kind"));
        q.finish();
        w.openings.push_back(op);
      }
    }
    o.finish();
    s.walls.push_back(std::move(w));
  }

  if (auto* list = root.opt("confounders")) {
    as_array(*list, root.at("confounders"));
    for (std::size_t i = 0; i < list->size(); ++i) {
      Object o((*list)[i], "confounders[" + std::to_string(i) + "]");
      ConfounderSpec c;
      const std::string type = as_string(o.req("type"), o.at("type"));
      if (type == "cabinet") {
        c.type = ConfounderType::Cabinet;
      } else if (type == "poster") {
        c.type = ConfounderType::Poster;
      } else {
        throw SchemaError(o.at("type") + ": expected 'cabinet' or 'poster'");
      }
      c.wall = as_int(o.req("wall"), o.at("wall"));
      c.offset = as_double(o.req("offset"), o.at("offset"));
      if (auto* v = o.opt("bottom")) c.bottom = as_double(*v, o.at("bottom"));
      c.width = as_double(o.req("width"), o.at("width"));
      c.height = as_double(o.req("height"), o.at("height"));
      c.depth = as_double(o.req("depth"), o.at("depth"));
      if (auto* v = o.opt("side")) c.side = read_side(*v, o.at("side"));
      o.finish();
      s.confounders.push_back(c);
    }
  }

  if (auto* list = root.opt("rooms")) {
    as_array(*list, root.at("rooms"));
    for (std::size_t i = 0; i < list->size(); ++i) {
      Object o((*list)[i], "rooms[" + std::to_string(i) + "]");
      RoomSpec r;
      r.id = as_int(o.req("id"), o.at("id"));
      r.label = as_string(o.req("label"), o.at("label"));
      r.min = as_vec2(o.req("min"), o.at("min"));
      r.max = as_vec2(o.req("max"), o.at("max"));
      if (auto* v = o.opt("seed_spacing")) r.seed_spacing = as_double(*v, o.at("seed_spacing"));
      o.finish();
      s.rooms.push_back(r);
    }
  }

  const json& traj = as_array(root.req("trajectory"), root.at("trajectory"));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Object o(traj[i], "trajectory[" + std::to_string(i) + "]");
    Waypoint w;
    w.position = as_vec3(o.req("position"), o.at("position"));
    w.yaw_deg = as_double(o.req("yaw_deg"), o.at("yaw_deg"));
    o.finish();
    s.trajectory.push_back(w);
  }
  root.finish();
  return s;
}

SceneSpec read_scene_spec(const fs::path& path) {
  return with_path(path, [&] { return load_scene_spec(read_file(path, "scene")); });
}

// ---- truth/1 ----

std::string save_truth(const GroundTruth& t) {
  json passages = json::array();
  for (const auto& p : t.passages) {
    passages.push_back({{"id", p.id},
                        {"wall_id", p.wall_id},
                        {"centroid", vec_json(p.centroid)},
                        {"extent", vec_json(p.extent)},
                        {"kind", std::string(to_string(p.kind))}});
  }
  json doors = json::array();
  for (const auto& d : t.doors) {
    doors.push_back({{"id", d.id},
                     {"wall_id", d.wall_id},
                     {"state", std::string(to_string(d.state))},
                     {"centroid", vec_json(d.centroid)}});
  }
  json rooms = json::array();
  for (const auto& r : t.rooms) rooms.push_back(room_json(r));
  json walls = json::array();
  for (const auto& w : t.walls) {
    const auto c = w.plane.coeffs();
    walls.push_back({{"id", w.id}, {"plane", json::array({c[0], c[1], c[2], c[3]})}});
  }
  json doc{{"schema", kTruthSchema},
           {"passages", std::move(passages)},
           {"doors", std::move(doors)},
           {"rooms", std::move(rooms)},
           {"walls", std::move(walls)}};
  return doc.dump(1) + "\n";
}

GroundTruth load_truth(const std::string& document) {
  const json doc = parse_doc(document, "truth");
  check_schema(doc, kTruthSchema);
  Object root(doc, "truth");
  root.req("schema");
  GroundTruth t;
  const json& passages = as_array(root.req("passages"), root.at("passages"));
  for (std::size_t i = 0; i < passages.size(); ++i) {
    Object o(passages[i], "passages[" + std::to_string(i) + "]");
    TruthPassage p;
    p.id = as_int(o.req("id"), o.at("id"));
    p.wall_id = as_int(o.req("wall_id"), o.at("wall_id"));
    p.centroid = as_vec3(o.req("centroid"), o.at("centroid"));
    p.extent = as_vec2(o.req("extent"), o.at("extent"));
    p.kind = read_kind(o.req("kind"), o.at("kind"));
    o.finish();
    t.passages.push_back(p);
  }
  const json& doors = as_array(root.req("doors"), root.at("doors"));
  for (std::size_t i = 0; i < doors.size(); ++i) {
    Object o(doors[i], "doors[" + std::to_string(i) + "]");
    TruthDoor d;
    d.id = as_int(o.req("id"), o.at("id"));
    d.wall_id = as_int(o.req("wall_id"), o.at("wall_id"));
    d.state = read_door_state(o.req("state"), o.at("state"));
    d.centroid = as_vec3(o.req("centroid"), o.at("centroid"));
    o.finish();
    t.doors.push_back(d);
  }
  t.rooms = read_room_list(root.req("rooms"), root.at("rooms"));
  const json& walls = as_array(root.req("walls"), root.at("walls"));
  for (std::size_t i = 0; i < walls.size(); ++i) {
    Object o(walls[i], "walls[" + std::to_string(i) + "]");
    TruthWall w;
    w.id = as_int(o.req("id"), o.at("id"));
    const json& p = as_array(o.req("plane"), o.at("plane"), 4);
    const Eigen::Vector3d n(as_double(p[0], o.at("plane")), as_double(p[1], o.at("plane")),
                            as_double(p[2], o.at("plane")));
    if (!(n.norm() > 0.0)) throw SchemaError(o.at("plane") + ": zero normal");
    w.plane = PlaneParams(n, as_double(p[3], o.at("plane")));
    o.finish();
    t.walls.push_back(w);
  }
  root.finish();
  return t;
}

GroundTruth read_truth(const fs::path& path) {
  return with_path(path, [&] { return load_truth(read_file(path, "truth")); });
}

// ---- rooms/1 ----

std::string save_rooms(const std::vector<RoomRegion>& rooms) {
  json list = json::array();
  for (const auto& r : rooms) list.push_back(room_json(r));
  json doc{{"schema", kRoomsSchema}, {"rooms", std::move(list)}};
  return doc.dump(1) + "\n";
}

std::vector<RoomRegion> load_rooms(const std::string& document) {
  const json doc = parse_doc(document, "rooms");
  check_schema(doc, kRoomsSchema);
  Object root(doc, "rooms");
  root.req("schema");
  auto rooms = read_room_list(root.req("rooms"), root.at("rooms"));
  root.finish();
  return rooms;
}

std::vector<RoomRegion> read_rooms(const fs::path& path) {
  return with_path(path, [&] { return load_rooms(read_file(path, "rooms")); });
}

void write_synthetic(const fs::path& dir, const SyntheticDataset& data) {
  fs::create_directories(dir);
  fs::remove_all(dir / "poses");
  fs::remove_all(dir / "clouds");
  save_sequence(dir, data.keyframes);
  write_text(dir / "truth.json", save_truth(data.truth));
  write_text(dir / "rooms.json", save_rooms(data.truth.rooms));
}

}  // namespace passmap
