#include <gtest/gtest.h>

#include <cmath>

#include "passmap/errors.hpp"
#include "passmap/geometry.hpp"
#include "support.hpp"

using namespace passmap;
using passmap::testing::Gen;

TEST(UnitVec3, NormalizesAndRejectsZero) {
  const UnitVec3 u(Eigen::Vector3d(3.0, 0.0, 4.0));
  EXPECT_NEAR(u.vec().norm(), 1.0, 1e-15);
  EXPECT_NEAR(u.x(), 0.6, 1e-15);
  EXPECT_THROW(UnitVec3(Eigen::Vector3d::Zero()), DegenerateInput);
  EXPECT_THROW(UnitVec3(Eigen::Vector3d(NAN, 0, 0)), DegenerateInput);
}

TEST(PlaneParams, CanonicalOrientationProperty) {
  Gen g(1);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d n = g.unit_vector();
    const double d = g.uniform(-5, 5);
    const PlaneParams a(n, d);
    const PlaneParams b(-n, -d);
    // Same plane either way round.
    EXPECT_NEAR((a.coeffs() - b.coeffs()).norm(), 0.0, 1e-12);
    // Dominant component is positive.
    Eigen::Index k;
    a.normal().vec().cwiseAbs().maxCoeff(&k);
    EXPECT_GT(a.normal().vec()[k], 0.0);
    // Canonicalization is idempotent.
    EXPECT_LT((canonicalize(a).coeffs() - a.coeffs()).norm(), 1e-15);
  }
}

TEST(PlaneParams, ThroughPointHasZeroDistance) {
  Gen g(2);
  for (int i = 0; i < 200; ++i) {
    const Point3 p = g.point(10);
    const PlaneParams pl = PlaneParams::through(p, g.unit_vector());
    EXPECT_NEAR(signed_distance(p, pl), 0.0, 1e-12);
    const Point3 q = g.point(10);
    EXPECT_NEAR(signed_distance(pl.project(q), pl), 0.0, 1e-12);
    EXPECT_NEAR(signed_distance(reflect(q, pl), pl), -signed_distance(q, pl), 1e-12);
  }
}

TEST(PlaneParams, TransformMatchesTransformedPoints) {
  Gen g(3);
  for (int i = 0; i < 100; ++i) {
    const PlaneParams pl(g.unit_vector(), g.uniform(-3, 3));
    Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
    T.linear() = Eigen::AngleAxisd(g.uniform(0, M_PI), g.unit_vector()).toRotationMatrix();
    T.translation() = g.point(5);
    const PlaneParams moved = pl.transformed(T);
    const Point3 q = g.point(5);
    EXPECT_NEAR(std::abs(signed_distance(T * q, moved)), std::abs(signed_distance(q, pl)), 1e-10);
  }
}

TEST(PlaneAngle, SymmetricAndSignFree) {
  const PlaneParams a(Eigen::Vector3d(1, 0, 0), 0.0);
  const PlaneParams b(Eigen::Vector3d(1, 1, 0), 0.0);
  EXPECT_NEAR(plane_angle(a, b), M_PI / 4, 1e-12);
  EXPECT_NEAR(plane_angle(b, a), M_PI / 4, 1e-12);
  EXPECT_NEAR(plane_angle(a, PlaneParams(Eigen::Vector3d(-1, 0, 0), 2.0)), 0.0, 1e-12);
}

TEST(InPlaneBasis, OrthonormalWithVerticalUp) {
  Gen g(4);
  for (int i = 0; i < 300; ++i) {
    const PlaneParams pl(g.unit_vector(), g.uniform(-4, 4));
    const InPlaneBasis b = make_basis(pl);
    EXPECT_NEAR(b.up.norm(), 1.0, 1e-12);
    EXPECT_NEAR(b.across.norm(), 1.0, 1e-12);
    EXPECT_NEAR(b.up.dot(b.normal), 0.0, 1e-12);
    EXPECT_NEAR(b.across.dot(b.up), 0.0, 1e-12);
    EXPECT_NEAR(signed_distance(b.origin, pl), 0.0, 1e-12);
    if (!is_near_horizontal_plane(pl)) {
      EXPECT_GT(b.up.z(), 0.0);
    }
    // Round trip of an in-plane point.
    const Vec2 q(g.uniform(-3, 3), g.uniform(-3, 3));
    EXPECT_NEAR((b.to_2d(b.to_3d(q)) - q).norm(), 0.0, 1e-12);
  }
}

TEST(InPlaneBasis, VerticalWallHeightIsZ) {
  const PlaneParams wall(Eigen::Vector3d(0, 1, 0), -5.0);
  const InPlaneBasis b = make_basis(wall);
  const Vec2 q = b.to_2d(Point3(2.0, 5.0, 1.7));
  EXPECT_NEAR(q.y(), 1.7, 1e-12);
  EXPECT_NEAR(std::abs(q.x()), 2.0, 1e-12);
}

TEST(InPlaneBasis, HorizontalDetection) {
  EXPECT_TRUE(is_near_horizontal_plane(PlaneParams(Eigen::Vector3d(0, 0, 1), 0.0)));
  EXPECT_TRUE(is_near_horizontal_plane(PlaneParams(Eigen::Vector3d(0.05, 0, 1), 0.0)));
  EXPECT_FALSE(is_near_horizontal_plane(PlaneParams(Eigen::Vector3d(0.2, 0, 1), 0.0)));
  EXPECT_FALSE(is_near_horizontal_plane(PlaneParams(Eigen::Vector3d(1, 0, 0), 0.0)));
}

TEST(Box2, SeparationCases) {
  Box2 a, b;
  EXPECT_TRUE(std::isinf(a.separation(b)));
  a.expand({0, 0});
  a.expand({1, 1});
  b.expand({1.5, 0.2});
  b.expand({2, 0.8});
  EXPECT_NEAR(a.separation(b), 0.5, 1e-12);
  EXPECT_NEAR(b.separation(a), 0.5, 1e-12);
  Box2 c;
  c.expand({0.5, 0.5});
  EXPECT_EQ(a.separation(c), 0.0);
  EXPECT_EQ(a.extent(), Vec2(1, 1));
  EXPECT_EQ(a.center(), Vec2(0.5, 0.5));
}
