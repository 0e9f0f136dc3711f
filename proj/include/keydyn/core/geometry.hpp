#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "keydyn/core/rng.hpp"

namespace keydyn {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// wrap to (-pi, pi]
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

// planar object / frame configuration
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]

  Pose2 normalized() const { return {x, y, wrap_angle(theta)}; }
  Vec2 translation() const { return {x, y}; }
};

// rigid map of the plane: rotate by dtheta, then translate by (dx, dy)
struct Se2Transform {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  static Se2Transform identity() { return {}; }
};

inline Vec2 se2_apply(const Se2Transform& t, const Vec2& p) {
  double c = std::cos(t.dtheta), s = std::sin(t.dtheta);
  return {c * p.x() - s * p.y() + t.dx, s * p.x() + c * p.y() + t.dy};
}

// rotation part only; velocities and other free vectors
inline Vec2 se2_rotate_vector(const Se2Transform& t, const Vec2& v) {
  double c = std::cos(t.dtheta), s = std::sin(t.dtheta);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// a then b applied on top: compose(b, a) * p == b * (a * p)
inline Se2Transform se2_compose(const Se2Transform& b, const Se2Transform& a) {
  Vec2 shifted = se2_apply(b, Vec2(a.dx, a.dy));
  return {shifted.x(), shifted.y(), wrap_angle(a.dtheta + b.dtheta)};
}

inline Se2Transform se2_inverse(const Se2Transform& t) {
  double c = std::cos(t.dtheta), s = std::sin(t.dtheta);
  return {-(c * t.dx + s * t.dy), -(-s * t.dx + c * t.dy), wrap_angle(-t.dtheta)};
}

inline Pose2 se2_apply_pose(const Se2Transform& t, const Pose2& p) {
  Vec2 q = se2_apply(t, p.translation());
  return {q.x(), q.y(), wrap_angle(p.theta + t.dtheta)};
}

// pusher velocity command, m/s
struct Action {
  double vx = 0.0;
  double vy = 0.0;

  Vec2 vec() const { return {vx, vy}; }
  double norm() const { return std::hypot(vx, vy); }

  Action clamped(double v_max) const {
    double n = norm();
    if (n <= v_max || n == 0.0) return *this;
    double s = v_max / n;
    return {vx * s, vy * s};
  }
};

struct PoseError {
  double pos_cm = 0.0;
  double angle_deg = 0.0;
};

inline PoseError pose_error(const Pose2& a, const Pose2& b) {
  double pos = 100.0 * std::hypot(a.x - b.x, a.y - b.y);
  double ang = std::abs(wrap_angle(a.theta - b.theta)) * 180.0 / std::numbers::pi;
  return {pos, ang};
}

struct AugmentationRanges {
  double translation = 0.3;              // +- range, meters
  double rotation = std::numbers::pi;    // +- range, radians
};

inline Se2Transform sample_augmentation(Rng& rng, const AugmentationRanges& ranges) {
  double dx = rng.uniform(-ranges.translation, ranges.translation);
  double dy = rng.uniform(-ranges.translation, ranges.translation);
  double dtheta = rng.uniform(-ranges.rotation, ranges.rotation);
  return {dx, dy, wrap_angle(dtheta)};
}

}  // namespace keydyn
