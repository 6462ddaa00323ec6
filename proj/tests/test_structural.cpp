#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "passmap/errors.hpp"
#include "passmap/structural.hpp"
#include "support.hpp"

using namespace passmap;
using passmap::testing::Gen;

namespace {

constexpr double kDeg = M_PI / 180.0;

PlaneObservation wall_obs(Gen& g, double x0, double y0, double y1, std::size_t n = 400) {
  PlaneObservation o;
  o.plane = PlaneParams(Eigen::Vector3d(1, 0, 0), -x0);
  for (std::size_t i = 0; i < n; ++i) o.points.points.emplace_back(x0, g.uniform(y0, y1), g.uniform(0.0, 2.5));
  return o;
}

// Door leaf of `width` x 2.0 in the plane with normal n through center.
Door make_door(EntityId id, const Eigen::Vector3d& n, const Point3& center, double width = 0.9) {
  Door d;
  d.id = id;
  d.plane = PlaneParams::through(center, n);
  const InPlaneBasis b = make_basis(d.plane);
  for (double u = -width / 2; u <= width / 2; u += 0.05) {
    for (double v = -1.0; v <= 1.0; v += 0.05) d.inliers.points.push_back(center + u * b.across + v * b.up);
  }
  d.observing_keyframes = {0};
  refresh_geometry(d);
  return d;
}

}  // namespace

TEST(DoorState, AgreesWithCoplanarityOracle) {
  Gen g(31);
  const DoorThresholds th;
  int closed = 0;
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d nw = g.unit_vector();
    const double dw = g.uniform(-3, 3);
    const double angle = g.uniform(0.0, 20.0) * kDeg;
    const double shift = g.uniform(-0.16, 0.16);
    Eigen::Vector3d nd = g.tilt(nw, angle);
    double dd = dw + shift;
    if (g.coin()) {
      nd = -nd;
      dd = -dd;
    }
    const oracle::Plane w{nw, dw}, d{nd, dd};
    const oracle::Plane cw = oracle::canonical(w), cd = oracle::canonical(d);
    // Skip pairs within rounding of either threshold.
    if (std::abs(oracle::normal_angle(cd.n, cw.n) - th.tau_theta) < 1e-9) continue;
    if (std::abs(std::abs(cd.d - cw.d) - th.tau_d) < 1e-9) continue;
    const bool expect = oracle::coplanar(d, w, th.tau_theta, th.tau_d);
    const DoorState got = classify_door_state(PlaneParams(nd, dd), PlaneParams(nw, dw), th);
    EXPECT_EQ(got == DoorState::Closed, expect) << "angle " << angle / kDeg << " shift " << shift;
    closed += expect;
  }
  // Both outcomes are well represented.
  EXPECT_GT(closed, 200);
  EXPECT_LT(closed, 1800);
}

TEST(DoorState, WorkedCases) {
  const DoorThresholds th;
  const PlaneParams wall(Eigen::Vector3d(0, 1, 0), 0.0);
  // Flush leaf 3 cm proud of the wall.
  EXPECT_EQ(classify_door_state(PlaneParams(Eigen::Vector3d(0, 1, 0), -0.03), wall, th), DoorState::Closed);
  // Leaf swung 30 degrees.
  const Eigen::Vector3d n30(std::sin(30 * kDeg), std::cos(30 * kDeg), 0);
  EXPECT_EQ(classify_door_state(PlaneParams(n30, 0.0), wall, th), DoorState::Open);
  // Parallel but 20 cm away.
  EXPECT_EQ(classify_door_state(PlaneParams(Eigen::Vector3d(0, 1, 0), -0.2), wall, th), DoorState::Open);
}

TEST(Thresholds, Validation) {
  DoorThresholds th;
  th.tau_theta = 0.0;
  EXPECT_THROW(th.validate(), ConfigError);
  th = {};
  th.tau_d = -1.0;
  EXPECT_THROW(th.validate(), ConfigError);
  MergeConfig m;
  m.merge_offset = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(WallMap, SamePlaneMergesAndNewPlaneAppends) {
  Gen g(32);
  std::vector<Wall> walls;
  walls = update_wall_map(walls, wall_obs(g, 2.0, 0.0, 2.0), 0);
  walls = update_wall_map(walls, wall_obs(g, 2.02, 1.5, 3.5), 1);
  ASSERT_EQ(walls.size(), 1u);
  EXPECT_EQ(walls[0].id, 0);
  EXPECT_EQ(walls[0].observing_keyframes, (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(walls[0].inliers.size(), 800u);
  EXPECT_NEAR(walls[0].bbox.extent().x(), 3.5, 0.05);

  walls = update_wall_map(walls, wall_obs(g, 5.0, 0.0, 2.0), 2);
  ASSERT_EQ(walls.size(), 2u);
  EXPECT_EQ(walls[1].id, 1);

  // Same plane but far along it: a separate wall.
  walls = update_wall_map(walls, wall_obs(g, 2.0, 6.0, 8.0), 3);
  ASSERT_EQ(walls.size(), 3u);
  EXPECT_EQ(walls[2].id, 2);
}

TEST(WallMap, RefitMatchesOracleOverUnion) {
  Gen g(33);
  std::vector<Wall> walls;
  PlaneObservation a = wall_obs(g, 1.0, 0.0, 2.0);
  PlaneObservation b = wall_obs(g, 1.05, 1.0, 3.0);
  walls = update_wall_map(walls, a, 0);
  walls = update_wall_map(walls, b, 1);
  ASSERT_EQ(walls.size(), 1u);
  std::vector<Eigen::Vector3d> all = a.points.points;
  all.insert(all.end(), b.points.points.begin(), b.points.points.end());
  const oracle::Plane ref = oracle::tls_plane(all);
  EXPECT_LT(oracle::normal_angle(walls[0].plane.normal().vec(), ref.n), 1e-9);
  EXPECT_LT(oracle::offset_gap({walls[0].plane.normal().vec(), walls[0].plane.offset()}, ref), 1e-9);
}

TEST(Coalesce, WallsThatGrowTogetherMerge) {
  Gen g(34);
  std::vector<Wall> walls;
  walls = update_wall_map(walls, wall_obs(g, 0.0, 0.0, 2.0), 0);
  walls = update_wall_map(walls, wall_obs(g, 0.0, 4.0, 6.0), 1);
  walls = update_wall_map(walls, wall_obs(g, 3.0, 0.0, 2.0), 2);
  ASSERT_EQ(walls.size(), 3u);
  // Nothing overlaps yet.
  EXPECT_TRUE(coalesce_walls(walls).empty());
  // Grow wall 1 toward wall 0 directly (bypassing the map update).
  for (int i = 0; i < 200; ++i) walls[1].inliers.points.emplace_back(0.0, g.uniform(2.1, 4.0), g.uniform(0.0, 2.5));
  walls[1].observing_keyframes.push_back(3);
  refresh_geometry(walls[1]);
  const auto removed = coalesce_walls(walls);
  ASSERT_EQ(removed.size(), 1u);
  EXPECT_EQ(removed[0], (std::pair<EntityId, EntityId>{1, 0}));
  ASSERT_EQ(walls.size(), 2u);
  EXPECT_EQ(walls[0].id, 0);
  EXPECT_EQ(walls[1].id, 2);
  EXPECT_EQ(walls[0].observing_keyframes, (std::vector<std::int64_t>{0, 1, 3}));
  EXPECT_NEAR(walls[0].bbox.extent().x(), 6.0, 0.05);
}

TEST(Coalesce, ClosedDoorSurvivesMerge) {
  std::vector<Door> doors{make_door(0, {0, 1, 0}, {1.0, 0.03, 1.0}), make_door(1, {0, 1, 0}, {1.5, 0.03, 1.0})};
  doors[1].state = DoorState::Closed;
  doors[1].supporting_wall = 7;
  const auto removed = coalesce_doors(doors);
  ASSERT_EQ(removed.size(), 1u);
  ASSERT_EQ(doors.size(), 1u);
  EXPECT_EQ(doors[0].id, 0);
  EXPECT_EQ(doors[0].state, DoorState::Closed);
  EXPECT_EQ(doors[0].supporting_wall, std::optional<EntityId>(7));
}

TEST(Association, NearestCompatibleWall) {
  Gen g(35);
  const DoorThresholds th;
  std::vector<Wall> walls{passmap::testing::grid_wall(0, 0.0, 0.0, 4.0, 2.5, 0.1),
                          passmap::testing::grid_wall(1, 0.2, 0.0, 4.0, 2.5, 0.1),
                          passmap::testing::grid_wall(2, 3.0, 0.0, 4.0, 2.5, 0.1)};
  const Door near0 = make_door(5, {1, 0, 0}, {0.05, 2.0, 1.0});
  EXPECT_EQ(associate_door_to_wall(near0, walls, th), std::optional<EntityId>(0));
  const Door near1 = make_door(5, {1, 0, 0}, {0.17, 2.0, 1.0});
  EXPECT_EQ(associate_door_to_wall(near1, walls, th), std::optional<EntityId>(1));
  const Door far = make_door(5, {1, 0, 0}, {1.5, 2.0, 1.0});
  EXPECT_FALSE(associate_door_to_wall(far, walls, th).has_value());
  // Perpendicular leaf near wall 2 fails the angle gate.
  const Door perp = make_door(5, {0, 1, 0}, {3.1, 2.0, 1.0});
  EXPECT_FALSE(associate_door_to_wall(perp, walls, th).has_value());
}

TEST(DoorStates, ClosedLatches) {
  const DoorThresholds th;
  std::vector<Wall> walls{passmap::testing::grid_wall(0, 0.0, 0.0, 4.0, 2.5, 0.1)};
  std::vector<Door> doors{make_door(0, {1, 0, 0}, {0.03, 2.0, 1.0}),
                          make_door(1, Eigen::Vector3d(std::cos(30 * kDeg), std::sin(30 * kDeg), 0), {0.2, 1.0, 1.0})};
  const auto became = update_door_states(doors, walls, th);
  EXPECT_EQ(became, (std::vector<EntityId>{0}));
  EXPECT_EQ(doors[0].state, DoorState::Closed);
  EXPECT_EQ(doors[0].supporting_wall, std::optional<EntityId>(0));
  EXPECT_EQ(doors[1].state, DoorState::Open);

  // Swing the closed leaf open; the state stays Closed.
  const Point3 c = doors[0].centroid;
  doors[0] = make_door(0, Eigen::Vector3d(1, 1, 0).normalized(), c);
  doors[0].state = DoorState::Closed;
  doors[0].supporting_wall = 0;
  EXPECT_TRUE(update_door_states(doors, walls, th).empty());
  EXPECT_EQ(doors[0].state, DoorState::Closed);
}

TEST(DoorStates, UnsupportedDoorIsUnknown) {
  const DoorThresholds th;
  std::vector<Wall> walls;
  std::vector<Door> doors{make_door(0, {1, 0, 0}, {0.0, 0.0, 1.0})};
  update_door_states(doors, walls, th);
  EXPECT_EQ(doors[0].state, DoorState::Unknown);
  EXPECT_FALSE(doors[0].supporting_wall.has_value());
}

TEST(DoorGeometry, CentroidIsBboxCenterOnPlane) {
  Gen g(36);
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector3d n = g.unit_vector();
    n.z() *= 0.2;
    n.normalize();
    const Point3 c = g.point(3);
    const Door d = make_door(0, n, c, g.uniform(0.6, 1.2));
    EXPECT_NEAR(signed_distance(d.centroid, d.plane), 0.0, 1e-9);
    EXPECT_LT((d.centroid - c).norm(), 0.05);
  }
}
