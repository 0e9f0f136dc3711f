#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "keydyn/core/errors.hpp"
#include "keydyn/core/geometry.hpp"

namespace keydyn {

// Pinhole camera. Camera frame: x right, y down, z forward into the scene;
// pixel (0,0) is the top-left sample, u grows with x, v with y.
struct CameraModel {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // world -> camera
  Vec3 center = Vec3::Zero();                              // camera position, world frame

  struct Projection {
    double u = 0.0, v = 0.0;
    double depth = 0.0;  // camera-frame z, meters
  };

  Vec3 to_camera(const Vec3& p_world) const { return rotation * (p_world - center); }

  Vec3 to_world(const Vec3& p_cam) const { return rotation.transpose() * p_cam + center; }

  Projection project(const Vec3& p_world) const {
    Vec3 pc = to_camera(p_world);
    if (pc.z() <= 0.0) throw BehindCamera("point at or behind the camera plane");
    return {fx * pc.x() / pc.z() + cx, fy * pc.y() / pc.z() + cy, pc.z()};
  }

  Vec3 unproject(double u, double v, double depth) const {
    Vec3 pc((u - cx) / fx * depth, (v - cy) / fy * depth, depth);
    return to_world(pc);
  }

  bool in_bounds(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u <= width - 1.0 && v <= height - 1.0;
  }

  // Orients the camera toward `target`; image v axis points as downhill
  // (world -z) as the view direction allows.
  static CameraModel look_at(const Vec3& center, const Vec3& target, double fx, double fy,
                             int width, int height) {
    CameraModel cam;
    cam.fx = fx;
    cam.fy = fy;
    cam.width = width;
    cam.height = height;
    cam.cx = 0.5 * (width - 1);
    cam.cy = 0.5 * (height - 1);
    cam.center = center;

    Vec3 z_axis = (target - center).normalized();
    Vec3 down(0.0, 0.0, -1.0);
    Vec3 y_axis = down - down.dot(z_axis) * z_axis;
    if (y_axis.norm() < 1e-9) y_axis = Vec3(0.0, -1.0, 0.0);  // straight-down view
    y_axis.normalize();
    Vec3 x_axis = y_axis.cross(z_axis);
    cam.rotation.row(0) = x_axis;
    cam.rotation.row(1) = y_axis;
    cam.rotation.row(2) = z_axis;
    return cam;
  }

  // roll about the optical axis, radians
  CameraModel rolled(double angle) const {
    CameraModel out = *this;
    Eigen::Matrix3d roll;
    double c = std::cos(angle), s = std::sin(angle);
    roll << c, s, 0, -s, c, 0, 0, 0, 1;
    out.rotation = roll * rotation;
    return out;
  }
};

}  // namespace keydyn
