#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "passmap/errors.hpp"
#include "passmap/graph_io.hpp"
#include "support.hpp"

using namespace passmap;
using nlohmann::json;

namespace {

SceneGraph small_graph() {
  SceneGraph g;
  g.config.tau_d = 0.07;
  g.walls.push_back(passmap::testing::grid_wall(0, 0.0, 0.0, 4.0, 2.5, 0.25));
  g.walls.push_back(passmap::testing::grid_wall(1, 3.0, 0.0, 4.0, 2.5, 0.25));
  Door d;
  d.id = 0;
  d.plane = PlaneParams(Eigen::Vector3d(1, 0, 0), -0.03);
  for (double y = 1.0; y <= 1.9; y += 0.3) {
    for (double z = 0.0; z <= 2.0; z += 0.5) d.inliers.points.emplace_back(0.03, y, z);
  }
  d.observing_keyframes = {0, 2};
  refresh_geometry(d);
  d.state = DoorState::Closed;
  d.supporting_wall = 0;
  g.doors.push_back(d);
  Passage p;
  p.id = 0;
  p.wall_id = 0;
  p.centroid = Point3(0.0, 1.45, 1.0);
  p.extent = Vec2(0.9, 2.0);
  p.kind = PassageKind::Doorway;
  p.provenance = Provenance::ClosedDoor;
  p.associated_door = 0;
  p.confidence = 0.9;
  g.passages.push_back(p);
  g.rooms.push_back({0, "A", {{-2, 1.45, 1}, {-2, 3, 1}}});
  g.rooms.push_back({1, "B", {{2, 1.45, 1}}});
  g.edges.push_back({0, 0, 1});
  g.trajectory.push_back({0, 0.0, passmap::testing::look({-1, 1, 1.1}, {1, 0, 0})});
  g.trajectory.push_back({2, 0.2, passmap::testing::look({1, 1, 1.1}, {1, 0.3, 0})});
  g.gap_decisions.push_back({1, Point3(3, 2, 0.5), Vec2(1.8, 1.0), true, GapDecision::Reject});
  g.source_digest = "0123456789abcdef";
  return g;
}

json doc_of(const SceneGraph& g) { return json::parse(save_graph(g)); }

}  // namespace

TEST(GraphIo, EmptyGraphRoundTrip) {
  const SceneGraph g;
  const SceneGraph back = load_graph(save_graph(g));
  std::string why;
  EXPECT_TRUE(graphs_equal(g, back, 1e-9, &why)) << why;
}

TEST(GraphIo, PopulatedGraphRoundTripAndBytes) {
  const SceneGraph g = small_graph();
  ASSERT_TRUE(integrity_violations(g).empty());
  const std::string text = save_graph(g);
  const SceneGraph back = load_graph(text);
  std::string why;
  EXPECT_TRUE(graphs_equal(g, back, 1e-9, &why)) << why;
  EXPECT_EQ(save_graph(back), text);
  EXPECT_EQ(save_graph(g), text);
  EXPECT_EQ(back.config, g.config);
}

TEST(GraphIo, DanglingWallReference) {
  json doc = doc_of(small_graph());
  doc["passages"][0]["wall_id"] = 99;
  try {
    load_graph(doc.dump());
    FAIL() << "expected DanglingReference";
  } catch (const DanglingReference& e) {
    EXPECT_EQ(e.id(), 99);
  }
  doc = doc_of(small_graph());
  doc["doors"][0]["supporting_wall"] = 99;
  EXPECT_THROW(load_graph(doc.dump()), DanglingReference);
  doc = doc_of(small_graph());
  doc["edges"][0]["passage_id"] = 4;
  EXPECT_THROW(load_graph(doc.dump()), DanglingReference);
  doc = doc_of(small_graph());
  doc["passages"][0]["associated_door"] = 8;
  EXPECT_THROW(load_graph(doc.dump()), DanglingReference);
}

TEST(GraphIo, VersionMismatch) {
  json doc = doc_of(small_graph());
  doc["schema"] = "sgraph/2";
  EXPECT_THROW(load_graph(doc.dump()), SchemaVersionMismatch);
}

TEST(GraphIo, UnknownAndMissingFieldsRejected) {
  json doc = doc_of(small_graph());
  doc["walls"][0]["colour"] = "red";
  try {
    load_graph(doc.dump());
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos) << e.what();
  }
  doc = doc_of(small_graph());
  doc["future_section"] = json::array();
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
  doc = doc_of(small_graph());
  doc["passages"][0].erase("extent");
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
  doc = doc_of(small_graph());
  doc["passages"][0]["kind"] = "Hatch";
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
  EXPECT_THROW(load_graph("{not json"), SchemaError);
}

TEST(GraphIo, StructuralChecks) {
  json doc = doc_of(small_graph());
  doc["walls"][1]["id"] = 0;
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
  doc = doc_of(small_graph());
  doc["edges"][0]["room_a"] = 1;
  doc["edges"][0]["room_b"] = 0;
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
  doc = doc_of(small_graph());
  doc["keyframes"][0]["pose"][0] = 2.0;
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
  doc = doc_of(small_graph());
  doc["keyframes"][1]["id"] = 0;
  EXPECT_THROW(load_graph(doc.dump()), SchemaError);
}

TEST(GraphIo, FileHelpers) {
  const auto dir = std::filesystem::temp_directory_path() / "passmap_graph_io";
  std::filesystem::remove_all(dir);
  const SceneGraph g = small_graph();
  write_graph(dir / "sub" / "g.json", g);
  const SceneGraph back = read_graph(dir / "sub" / "g.json");
  EXPECT_TRUE(graphs_equal(g, back));
  std::ofstream(dir / "bad.json") << "{}";
  try {
    read_graph(dir / "bad.json");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_graph(dir / "missing.json"), Error);
}
