#include "passmap/graph_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace passmap {

using nlohmann::json;
using namespace jsonu;

namespace {

json plane_json(const PlaneParams& p) {
  const auto c = p.coeffs();
  return json::array({c[0], c[1], c[2], c[3]});
}

json entity_json(const PlanarEntity& e) {
  json inliers = json::array();
  for (const auto& p : e.inliers.points) {
    inliers.push_back(p.x());
    inliers.push_back(p.y());
    inliers.push_back(p.z());
  }
  return {{"id", e.id},
          {"plane", plane_json(e.plane)},
          {"bbox", {{"valid", e.bbox.valid}, {"min", vec_json(e.bbox.min)}, {"max", vec_json(e.bbox.max)}}},
          {"observing_keyframes", e.observing_keyframes},
          {"inliers", std::move(inliers)}};
}

json opt_id(const std::optional<EntityId>& id) { return id ? json(*id) : json(nullptr); }

std::optional<EntityId> read_opt_id(const json& v, const std::string& path) {
  if (v.is_null()) return std::nullopt;
  return as_int(v, path);
}

PlaneParams read_plane(const json& v, const std::string& path) {
  as_array(v, path, 4);
  const Eigen::Vector3d n(as_double(v[0], path), as_double(v[1], path), as_double(v[2], path));
  try {
    return PlaneParams(n, as_double(v[3], path));
  } catch (const Error&) {
    throw SchemaError(path + ": zero plane normal");
  }
}

void read_entity(Object& o, PlanarEntity& e) {
  e.id = as_int(o.req("id"), o.at("id"));
  e.plane = read_plane(o.req("plane"), o.at("plane"));
  Object box(o.req("bbox"), o.at("bbox"));
  e.bbox.valid = as_bool(box.req("valid"), box.at("valid"));
  e.bbox.min = as_vec2(box.req("min"), box.at("min"));
  e.bbox.max = as_vec2(box.req("max"), box.at("max"));
  box.finish();
  for (const auto& k : as_array(o.req("observing_keyframes"), o.at("observing_keyframes"))) {
    e.observing_keyframes.push_back(as_int(k, o.at("observing_keyframes")));
  }
  const json& flat = as_array(o.req("inliers"), o.at("inliers"));
  if (flat.size() % 3 != 0) throw SchemaError(o.at("inliers") + ": length is not a multiple of 3");
  e.inliers.points.reserve(flat.size() / 3);
  for (std::size_t i = 0; i < flat.size(); i += 3) {
    e.inliers.points.emplace_back(as_double(flat[i], o.at("inliers")), as_double(flat[i + 1], o.at("inliers")),
                                  as_double(flat[i + 2], o.at("inliers")));
  }
}

template <typename Enum, typename Fn>
Enum read_enum(const json& v, const std::string& path, std::initializer_list<Enum> values, Fn name) {
  const std::string s = as_string(v, path);
  for (Enum e : values) {
    if (name(e) == s) return e;
  }
  throw SchemaError(path + ": unknown value '" + s + "'");
}

std::string indexed(const std::string& section, std::size_t i) {
  return section + "[" + std::to_string(i) + "]";
}

template <typename T>
void check_unique_ids(const std::vector<T>& items, const char* what) {
  std::set<EntityId> ids;
  for (const auto& it : items) {
    if (!ids.insert(it.id).second) throw SchemaError(std::string("duplicate ") + what + " id " + std::to_string(it.id));
  }
}

}  // namespace

std::string save_graph(const SceneGraph& g) {
  json doc;
  doc["schema"] = kGraphSchema;
  doc["source_digest"] = g.source_digest;
  doc["config"] = config_to_json(g.config);

  json kfs = json::array();
  for (const auto& t : g.trajectory) {
    json pose = json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) pose.push_back(t.pose.rotation()(r, c));
      pose.push_back(t.pose.center()[r]);
    }
    kfs.push_back({{"id", t.kf_id}, {"timestamp", t.timestamp}, {"pose", std::move(pose)}});
  }
  doc["keyframes"] = std::move(kfs);

  json walls = json::array();
  for (const auto& w : g.walls) walls.push_back(entity_json(w));
  doc["walls"] = std::move(walls);

  json doors = json::array();
  for (const auto& d : g.doors) {
    json j = entity_json(d);
    j["supporting_wall"] = opt_id(d.supporting_wall);
    j["state"] = std::string(to_string(d.state));
    j["centroid"] = vec_json(d.centroid);
    doors.push_back(std::move(j));
  }
  doc["doors"] = std::move(doors);

  json passages = json::array();
  for (const auto& p : g.passages) {
    passages.push_back({{"id", p.id},
                        {"wall_id", p.wall_id},
                        {"centroid", vec_json(p.centroid)},
                        {"extent", vec_json(p.extent)},
                        {"kind", std::string(to_string(p.kind))},
                        {"provenance", std::string(to_string(p.provenance))},
                        {"associated_door", opt_id(p.associated_door)},
                        {"confidence", p.confidence}});
  }
  doc["passages"] = std::move(passages);

  json rooms = json::array();
  for (const auto& r : g.rooms) {
    json seeds = json::array();
    for (const auto& s : r.seeds) seeds.push_back(vec_json(s));
    rooms.push_back({{"id", r.id}, {"label", r.label}, {"seeds", std::move(seeds)}});
  }
  doc["rooms"] = std::move(rooms);

  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"passage_id", e.passage_id}, {"room_a", e.room_a}, {"room_b", e.room_b}});
  }
  doc["edges"] = std::move(edges);

  json gaps = json::array();
  for (const auto& r : g.gap_decisions) {
    gaps.push_back({{"wall_id", r.wall_id},
                    {"centroid", vec_json(r.centroid)},
                    {"extent", vec_json(r.extent)},
                    {"touches_bottom", r.touches_bottom},
                    {"decision", std::string(to_string(r.decision))}});
  }
  doc["gap_decisions"] = std::move(gaps);
  return doc.dump(1) + "\n";
}

SceneGraph load_graph(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("graph document is not valid JSON: ") + e.what());
  }
  check_schema(doc, kGraphSchema);
  Object root(doc, "graph");
  root.req("schema");
  SceneGraph g;
  g.source_digest = as_string(root.req("source_digest"), root.at("source_digest"));
  try {
    g.config = config_from_json(root.req("config"));
    g.config.validate();
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("graph.config: ") + e.what());
  }

  const json& kfs = as_array(root.req("keyframes"), root.at("keyframes"));
  for (std::size_t i = 0; i < kfs.size(); ++i) {
    Object o(kfs[i], indexed("keyframes", i));
    TrajectorySample t;
    t.kf_id = as_int(o.req("id"), o.at("id"));
    t.timestamp = as_double(o.req("timestamp"), o.at("timestamp"));
    const json& pose = as_array(o.req("pose"), o.at("pose"), 12);
    Eigen::Matrix3d r;
    Point3 c;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) r(row, col) = as_double(pose[row * 4 + col], o.at("pose"));
      c[row] = as_double(pose[row * 4 + 3], o.at("pose"));
    }
    if (CameraPose::orthogonality_error(r) > 1e-6) throw SchemaError(o.at("pose") + ": rotation is not orthonormal");
    t.pose = CameraPose(r, c);
    o.finish();
    if (!g.trajectory.empty() && t.kf_id <= g.trajectory.back().kf_id) {
      throw SchemaError(o.path() + ": keyframe ids must be strictly increasing");
    }
    g.trajectory.push_back(t);
  }

  const json& walls = as_array(root.req("walls"), root.at("walls"));
  for (std::size_t i = 0; i < walls.size(); ++i) {
    Object o(walls[i], indexed("walls", i));
    Wall w;
    read_entity(o, w);
    o.finish();
    g.walls.push_back(std::move(w));
  }

  const json& doors = as_array(root.req("doors"), root.at("doors"));
  for (std::size_t i = 0; i < doors.size(); ++i) {
    Object o(doors[i], indexed("doors", i));
    Door d;
    read_entity(o, d);
    d.supporting_wall = read_opt_id(o.req("supporting_wall"), o.at("supporting_wall"));
    d.state = read_enum(o.req("state"), o.at("state"), {DoorState::Unknown, DoorState::Closed, DoorState::Open},
                        [](DoorState s) { return to_string(s); });
    d.centroid = as_vec3(o.req("centroid"), o.at("centroid"));
    o.finish();
    g.doors.push_back(std::move(d));
  }

  const json& passages = as_array(root.req("passages"), root.at("passages"));
  for (std::size_t i = 0; i < passages.size(); ++i) {
    Object o(passages[i], indexed("passages", i));
    Passage p;
    p.id = as_int(o.req("id"), o.at("id"));
    p.wall_id = as_int(o.req("wall_id"), o.at("wall_id"));
    p.centroid = as_vec3(o.req("centroid"), o.at("centroid"));
    p.extent = as_vec2(o.req("extent"), o.at("extent"));
    p.kind = read_enum(o.req("kind"), o.at("kind"), {PassageKind::Doorway, PassageKind::Archway, PassageKind::Unknown},
                       [](PassageKind k) { return to_string(k); });
    p.provenance = read_enum(o.req("provenance"), o.at("provenance"),
                             {Provenance::Traversal, Provenance::Gap, Provenance::ClosedDoor},
                             [](Provenance v) { return to_string(v); });
    p.associated_door = read_opt_id(o.req("associated_door"), o.at("associated_door"));
    p.confidence = as_double(o.req("confidence"), o.at("confidence"));
    o.finish();
    g.passages.push_back(p);
  }

  const json& rooms = as_array(root.req("rooms"), root.at("rooms"));
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    Object o(rooms[i], indexed("rooms", i));
    RoomRegion r;
    r.id = as_int(o.req("id"), o.at("id"));
    r.label = as_string(o.req("label"), o.at("label"));
    for (const auto& s : as_array(o.req("seeds"), o.at("seeds"))) r.seeds.push_back(as_vec3(s, o.at("seeds")));
    if (r.seeds.empty()) throw SchemaError(o.at("seeds") + ": a room needs at least one seed");
    o.finish();
    g.rooms.push_back(std::move(r));
  }

  const json& edges = as_array(root.req("edges"), root.at("edges"));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Object o(edges[i], indexed("edges", i));
    ConnectivityEdge e;
    e.passage_id = as_int(o.req("passage_id"), o.at("passage_id"));
    e.room_a = as_int(o.req("room_a"), o.at("room_a"));
    e.room_b = as_int(o.req("room_b"), o.at("room_b"));
    o.finish();
    if (!(e.room_a < e.room_b)) throw SchemaError(o.path() + ": room_a must be less than room_b");
    g.edges.push_back(e);
  }

  const json& gaps = as_array(root.req("gap_decisions"), root.at("gap_decisions"));
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    Object o(gaps[i], indexed("gap_decisions", i));
    GapDecisionRecord r;
    r.wall_id = as_int(o.req("wall_id"), o.at("wall_id"));
    r.centroid = as_vec3(o.req("centroid"), o.at("centroid"));
    r.extent = as_vec2(o.req("extent"), o.at("extent"));
    r.touches_bottom = as_bool(o.req("touches_bottom"), o.at("touches_bottom"));
    r.decision = read_enum(o.req("decision"), o.at("decision"),
                           {GapDecision::Accept, GapDecision::Reject, GapDecision::Defer},
                           [](GapDecision d) { return to_string(d); });
    o.finish();
    g.gap_decisions.push_back(r);
  }
  root.finish();

  check_unique_ids(g.walls, "wall");
  check_unique_ids(g.doors, "door");
  check_unique_ids(g.passages, "passage");
  check_unique_ids(g.rooms, "room");
  for (const auto& d : g.doors) {
    if (d.supporting_wall && !find_wall(g.walls, *d.supporting_wall)) throw DanglingReference("wall", *d.supporting_wall);
  }
  for (const auto& p : g.passages) {
    if (!find_wall(g.walls, p.wall_id)) throw DanglingReference("wall", p.wall_id);
    if (p.associated_door && !find_door(g.doors, *p.associated_door)) {
      throw DanglingReference("door", *p.associated_door);
    }
  }
  auto has_room = [&](EntityId id) {
    for (const auto& r : g.rooms) {
      if (r.id == id) return true;
    }
    return false;
  };
  for (const auto& e : g.edges) {
    bool found = false;
    for (const auto& p : g.passages) found = found || p.id == e.passage_id;
    if (!found) throw DanglingReference("passage", e.passage_id);
    if (!has_room(e.room_a)) throw DanglingReference("room", e.room_a);
    if (!has_room(e.room_b)) throw DanglingReference("room", e.room_b);
  }
  for (const auto& r : g.gap_decisions) {
    if (!find_wall(g.walls, r.wall_id)) throw DanglingReference("wall", r.wall_id);
  }
  return g;
}

void write_graph(const std::filesystem::path& path, const SceneGraph& graph) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << save_graph(graph);
  if (!out) throw Error("failed writing " + path.string());
}

SceneGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open graph file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_graph(ss.str());
  } catch (const DanglingReference&) {
    throw;
  } catch (const SchemaVersionMismatch&) {
    throw;
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace passmap
