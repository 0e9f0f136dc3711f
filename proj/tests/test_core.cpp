#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "keydyn/core/camera.hpp"
#include "keydyn/core/config.hpp"
#include "keydyn/core/geometry.hpp"
#include "keydyn/core/parallel.hpp"
#include "keydyn/core/rng.hpp"

namespace keydyn {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Se2, ApplyIdentity) {
  Vec2 p = se2_apply(Se2Transform::identity(), Vec2(1.0, 2.0));
  EXPECT_DOUBLE_EQ(p.x(), 1.0);
  EXPECT_DOUBLE_EQ(p.y(), 2.0);
}

TEST(Se2, ApplyQuarterTurnThenShift) {
  Se2Transform t{1.0, 0.0, kPi / 2.0};
  Vec2 p = se2_apply(t, Vec2(1.0, 0.0));
  EXPECT_NEAR(p.x(), 1.0, 1e-12);
  EXPECT_NEAR(p.y(), 1.0, 1e-12);
}

TEST(Se2, ApplyInverseRoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Se2Transform t{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-kPi, kPi)};
    Vec2 p(rng.uniform(-3, 3), rng.uniform(-3, 3));
    Vec2 back = se2_apply(se2_inverse(t), se2_apply(t, p));
    EXPECT_NEAR(back.x(), p.x(), 1e-12);
    EXPECT_NEAR(back.y(), p.y(), 1e-12);
  }
}

TEST(Se2, RotateVector) {
  EXPECT_NEAR(se2_rotate_vector({5, 5, 0.0}, Vec2(3, 4)).x(), 3.0, 1e-15);
  EXPECT_NEAR(se2_rotate_vector({5, 5, 0.0}, Vec2(3, 4)).y(), 4.0, 1e-15);
  Vec2 r = se2_rotate_vector({0, 0, kPi}, Vec2(1, 0));
  EXPECT_NEAR(r.x(), -1.0, 1e-12);
  EXPECT_NEAR(r.y(), 0.0, 1e-12);
}

TEST(Se2, RotationPreservesNorm) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Se2Transform t{0, 0, rng.uniform(-kPi, kPi)};
    Vec2 v(rng.uniform(-5, 5), rng.uniform(-5, 5));
    EXPECT_NEAR(se2_rotate_vector(t, v).norm(), v.norm(), 1e-12);
  }
}

TEST(Se2, GroupLaws) {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    Se2Transform t{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-kPi, kPi)};
    Se2Transform id1 = se2_compose(t, se2_inverse(t));
    EXPECT_NEAR(id1.dx, 0.0, 1e-12);
    EXPECT_NEAR(id1.dy, 0.0, 1e-12);
    EXPECT_NEAR(std::abs(wrap_angle(id1.dtheta)), 0.0, 1e-12);
    Se2Transform same = se2_compose(t, Se2Transform::identity());
    EXPECT_NEAR(same.dx, t.dx, 1e-12);
    EXPECT_NEAR(same.dy, t.dy, 1e-12);
  }
}

TEST(PoseErrorOp, ZeroAndDirect) {
  Pose2 a{0.5, -0.2, 1.0};
  PoseError e = pose_error(a, a);
  EXPECT_DOUBLE_EQ(e.pos_cm, 0.0);
  EXPECT_DOUBLE_EQ(e.angle_deg, 0.0);

  PoseError d = pose_error({0, 0, 0}, {0.03, 0, kPi / 6.0});
  EXPECT_NEAR(d.pos_cm, 3.0, 1e-12);
  EXPECT_NEAR(d.angle_deg, 30.0, 1e-12);
}

TEST(PoseErrorOp, WrapAround) {
  PoseError e = pose_error({0, 0, 3.1}, {0, 0, -3.1});
  double expected = (2.0 * kPi - 6.2) * 180.0 / kPi;  // about 4.78 degrees
  EXPECT_NEAR(e.angle_deg, expected, 1e-9);
  EXPECT_LT(e.angle_deg, 5.0);
}

TEST(PoseErrorOp, SymmetricAndTriangle) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Pose2 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi)};
    Pose2 b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi)};
    Pose2 c{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-kPi, kPi)};
    EXPECT_DOUBLE_EQ(pose_error(a, b).pos_cm, pose_error(b, a).pos_cm);
    EXPECT_NEAR(pose_error(a, b).angle_deg, pose_error(b, a).angle_deg, 1e-9);
    EXPECT_LE(pose_error(a, c).pos_cm, pose_error(a, b).pos_cm + pose_error(b, c).pos_cm + 1e-12);
  }
}

TEST(Camera, OpticalAxisAndSimilarTriangles) {
  CameraModel cam = CameraModel::look_at(Vec3(0, 0, 1), Vec3(0, 0, 0), 200, 200, 160, 120);
  auto p = cam.project(Vec3(0, 0, 0));
  EXPECT_NEAR(p.u, cam.cx, 1e-12);
  EXPECT_NEAR(p.v, cam.cy, 1e-12);
  EXPECT_NEAR(p.depth, 1.0, 1e-12);

  auto near = cam.project(Vec3(0.1, 0, 0.5));   // depth 0.5
  auto far = cam.project(Vec3(0.1, 0, 0.0));    // depth 1.0
  EXPECT_NEAR(std::abs(far.u - cam.cx), 0.5 * std::abs(near.u - cam.cx), 1e-9);
}

TEST(Camera, BehindCameraThrows) {
  CameraModel cam = CameraModel::look_at(Vec3(0, 0, 1), Vec3(0, 0, 0), 200, 200, 160, 120);
  EXPECT_THROW(cam.project(Vec3(0, 0, 2.0)), BehindCamera);
}

TEST(Camera, ProjectUnprojectRoundTrip) {
  CameraModel cam = CameraModel::look_at(Vec3(0, -0.85, 0.85), Vec3(0, 0, 0), 200, 200, 160, 120);
  EXPECT_NEAR(cam.rotation.determinant(), 1.0, 1e-12);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    Vec3 p(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.3));
    auto proj = cam.project(p);
    Vec3 back = cam.unproject(proj.u, proj.v, proj.depth);
    EXPECT_NEAR((back - p).norm(), 0.0, 1e-9);
  }
}

TEST(Augmentation, ZeroWidthIsIdentity) {
  Rng rng(1);
  Se2Transform t = sample_augmentation(rng, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(t.dx, 0.0);
  EXPECT_DOUBLE_EQ(t.dy, 0.0);
  EXPECT_DOUBLE_EQ(t.dtheta, 0.0);
}

TEST(Augmentation, FixedSeedReproducible) {
  Rng a(42), b(42);
  Se2Transform ta = sample_augmentation(a, {});
  Se2Transform tb = sample_augmentation(b, {});
  EXPECT_DOUBLE_EQ(ta.dx, tb.dx);
  EXPECT_DOUBLE_EQ(ta.dy, tb.dy);
  EXPECT_DOUBLE_EQ(ta.dtheta, tb.dtheta);
}

TEST(Augmentation, RotationMeanNearZero) {
  Rng rng(9);
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += sample_augmentation(rng, {}).dtheta;
  EXPECT_NEAR(sum / n, 0.0, 0.05);
}

TEST(RngStreams, DeriveIsStable) {
  Rng root(123);
  Rng a = root.derive({1, 5});
  Rng b = root.derive({1, 5});
  Rng c = root.derive({1, 6});
  EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(a.next(), c.next());
}

TEST(Parallel, MatchesSerial) {
  std::vector<int> serial(100), parallel(100);
  auto fill = [](std::vector<int>& out) {
    return [&out](int i) { out[i] = i * i + 1; };
  };
  parallel_for(100, 1, fill(serial));
  parallel_for(100, 4, fill(parallel));
  EXPECT_EQ(serial, parallel);
}

TEST(ConfigTree, OverridesAndLookup) {
  Config cfg;
  EXPECT_EQ(cfg.get<int>("plan.n_samples"), 1000);
  EXPECT_DOUBLE_EQ(cfg.get<double>("sim.v_max"), 0.2);
  cfg.set_override("plan.n_samples=250");
  cfg.set_override("task=occlusions");
  EXPECT_EQ(cfg.get<int>("plan.n_samples"), 250);
  EXPECT_EQ(cfg.get<std::string>("task"), "occlusions");
  EXPECT_THROW(cfg.get<int>("no.such.key"), Error);
}

TEST(ConfigTree, FingerprintTracksContent) {
  Config a, b;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.set_override("seed=1");
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

}  // namespace
}  // namespace keydyn
