#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "passmap/errors.hpp"
#include "passmap/synth.hpp"

using namespace passmap;
namespace fs = std::filesystem;

namespace {

// One 4 x 2.5 m wall along +x at y = 0 (normal +y), watched from y = 3.
SceneSpec single_wall(bool with_opening) {
  SceneSpec s;
  s.walls.push_back({0, {0, 0}, {4, 0}, 0.0, 2.5, {}});
  if (with_opening) s.walls[0].openings.push_back({0, 2.0, 0.0, 0.9, 2.0, {}, {}, {}});
  s.trajectory = {{{2.0, 3.0, 1.25}, -90.0}, {{2.2, 3.0, 1.25}, -90.0}};
  s.density = 400;
  s.label_noise = 0.0;
  s.rng_seed = 9;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative path -> contents for every file under dir.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

Passage det(EntityId id, const Point3& c, PassageKind kind = PassageKind::Doorway) {
  Passage p;
  p.id = id;
  p.centroid = c;
  p.extent = Vec2(0.9, 2.0);
  p.kind = kind;
  p.confidence = 0.7;
  return p;
}

GroundTruth two_truth() {
  GroundTruth t;
  t.passages.push_back({0, 0, {0, 0, 1}, {0.9, 2.0}, PassageKind::Doorway});
  t.passages.push_back({1, 1, {4, 0, 1}, {0.9, 2.0}, PassageKind::Unknown});
  return t;
}

}  // namespace

TEST(Generate, DenseWallYieldsAreaTimesDensity) {
  const SyntheticDataset d = generate(single_wall(false));
  ASSERT_GE(d.keyframes.size(), 1u);
  std::size_t wall_points = 0;
  for (const auto& kf : d.keyframes) {
    for (const auto& l : kf.cloud.labels) wall_points += l.class_id == SemanticClass::Wall;
  }
  EXPECT_GE(wall_points, 3600u);
  ASSERT_EQ(d.truth.walls.size(), 1u);
  EXPECT_NEAR(std::abs(d.truth.walls[0].plane.normal().y()), 1.0, 1e-12);
}

TEST(Generate, OpeningIsEmptyWithoutNoise) {
  SceneSpec s = single_wall(true);
  s.noise_sigma = 0.0;
  const SyntheticDataset d = generate(s);
  std::size_t on_wall = 0;
  for (const auto& kf : d.keyframes) {
    for (const auto& pc : kf.cloud.points.points) {
      const Point3 p = kf.pose.to_global(pc);
      if (std::abs(p.y()) > 1e-9) continue;
      ++on_wall;
      const bool inside = p.x() > 1.55 && p.x() < 2.45 && p.z() > 0.0 && p.z() < 2.0;
      EXPECT_FALSE(inside) << p.transpose();
    }
  }
  EXPECT_GT(on_wall, 3000u);
  ASSERT_EQ(d.truth.passages.size(), 1u);
  EXPECT_LT((d.truth.passages[0].centroid - Point3(2.0, 0.0, 1.0)).norm(), 1e-12);
  EXPECT_EQ(d.truth.passages[0].kind, PassageKind::Unknown);
}

TEST(Generate, PointsStayInsideFrustum) {
  const SceneSpec s = office3_scene();
  const SyntheticDataset d = generate(s);
  const double tan_h = std::tan(0.5 * s.camera.hfov_deg * M_PI / 180.0);
  for (std::size_t i = 0; i < d.keyframes.size(); i += 17) {
    for (const auto& p : d.keyframes[i].cloud.points.points) {
      // Noise can push a point slightly past the cut.
      ASSERT_GT(p.z(), s.camera.min_range - 0.1);
      ASSERT_LT(p.norm(), s.camera.max_range + 0.1);
      ASSERT_LE(std::abs(p.x()), tan_h * p.z() + 0.1);
    }
  }
}

TEST(Generate, FixedSeedIsByteIdentical) {
  const fs::path a = fs::temp_directory_path() / "passmap_synth_a";
  const fs::path b = fs::temp_directory_path() / "passmap_synth_b";
  fs::remove_all(a);
  fs::remove_all(b);
  SceneSpec s = single_wall(true);
  s.label_noise = 0.05;
  write_synthetic(a, generate(s));
  write_synthetic(b, generate(s));
  const auto ta = tree(a), tb = tree(b);
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, tb);
  s.rng_seed = 10;
  write_synthetic(b, generate(s));
  EXPECT_NE(tree(b), ta);
}

TEST(Generate, InvalidSpecsRejected) {
  SceneSpec s = single_wall(true);
  s.walls[0].openings[0].offset = 3.9;
  try {
    generate(s);
    FAIL() << "expected InvalidSpec";
  } catch (const InvalidSpec& e) {
    EXPECT_NE(std::string(e.what()).find("opening"), std::string::npos) << e.what();
  }
  s = single_wall(false);
  s.trajectory.clear();
  EXPECT_THROW(s.validate(), InvalidSpec);
  s = single_wall(false);
  s.walls[0].end = s.walls[0].start;
  EXPECT_THROW(s.validate(), InvalidSpec);
  s = single_wall(false);
  s.trajectory[0].position.x() = NAN;
  EXPECT_THROW(s.validate(), InvalidSpec);
  s = single_wall(false);
  s.walls[0].openings.push_back({0, 1.0, 0.0, 0.5, 3.0, {}, {}, {}});
  EXPECT_THROW(s.validate(), InvalidSpec);
}

TEST(Score, WorkedExamples) {
  const GroundTruth t = two_truth();
  const ScoreMetrics perfect = score({det(0, {0.02, 0, 1}), det(1, {4, 0.05, 1}, PassageKind::Unknown)}, t);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.kind_accuracy, 1.0);
  EXPECT_NEAR(perfect.mean_centroid_error, 0.035, 1e-12);
  EXPECT_NEAR(perfect.max_centroid_error, 0.05, 1e-12);

  const ScoreMetrics half = score({det(0, {0, 0, 1})}, t);
  EXPECT_EQ(half.precision, 1.0);
  EXPECT_EQ(half.recall, 0.5);

  const ScoreMetrics none = score({}, t);
  EXPECT_EQ(none.precision, 1.0);
  EXPECT_EQ(none.recall, 0.0);

  const ScoreMetrics spurious = score({det(0, {0, 0, 1}), det(1, {9, 9, 1})}, t);
  EXPECT_EQ(spurious.precision, 0.5);

  EXPECT_THROW(score({}, t, 0.0), ConfigError);
}

TEST(Score, PermutationInvariant) {
  const GroundTruth t = two_truth();
  std::vector<Passage> d{det(0, {0.3, 0, 1}), det(1, {0.1, 0, 1}), det(2, {4.2, 0, 1}, PassageKind::Unknown)};
  const std::string ref = format_metrics(score(d, t));
  std::reverse(d.begin(), d.end());
  EXPECT_EQ(format_metrics(score(d, t)), ref);
  std::swap(d[0], d[1]);
  EXPECT_EQ(format_metrics(score(d, t)), ref);
}

TEST(Documents, SceneSpecRoundTrip) {
  const SceneSpec s = office3_scene();
  const std::string text = save_scene_spec(s);
  EXPECT_EQ(save_scene_spec(load_scene_spec(text)), text);
  EXPECT_THROW(load_scene_spec(R"({"schema":"scene/2"})"), SchemaVersionMismatch);
}

TEST(Documents, ShippedOfficeSpecMatchesPreset) {
  const SceneSpec shipped = read_scene_spec(fs::path(PASSMAP_SOURCE_DIR) / "data" / "office3" / "scene.json");
  EXPECT_EQ(save_scene_spec(shipped), save_scene_spec(office3_scene()));
}

TEST(Documents, TruthAndRoomsRoundTrip) {
  const SyntheticDataset d = generate(single_wall(true));
  GroundTruth t = d.truth;
  t.rooms.push_back({0, "A", {{1, 2, 1}, {3, 2, 1}}});
  t.doors.push_back({0, 0, DoorState::Open, {1, 0, 1}});
  const std::string text = save_truth(t);
  EXPECT_EQ(save_truth(load_truth(text)), text);
  const std::string rooms = save_rooms(t.rooms);
  EXPECT_EQ(save_rooms(load_rooms(rooms)), rooms);
  EXPECT_THROW(load_rooms(R"({"schema":"rooms/1","rooms":[{"id":0,"label":"A","seeds":[]}]})"), SchemaError);
}

TEST(Office, PresetShape) {
  const SceneSpec s = office3_scene();
  EXPECT_NO_THROW(s.validate());
  const SyntheticDataset d = generate(s);
  EXPECT_EQ(d.truth.passages.size(), 3u);
  EXPECT_EQ(d.truth.rooms.size(), 3u);
  std::size_t total = 0;
  for (const auto& kf : d.keyframes) total += kf.cloud.size();
  const double mean = static_cast<double>(total) / static_cast<double>(d.keyframes.size());
  // About 2,000 points per frame.
  EXPECT_GT(mean, 1500.0);
  EXPECT_LT(mean, 2500.0);
  EXPECT_EQ(trajectory_poses(s).size(), d.keyframes.size());
}
