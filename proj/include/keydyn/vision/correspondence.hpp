#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "keydyn/core/camera.hpp"
#include "keydyn/core/errors.hpp"
#include "keydyn/vision/descriptor_image.hpp"

namespace keydyn::vision {

// exp(-|I(p) - d|^2 / eta^2) per pixel
inline Heatmap heatmap(const DescriptorImage& img, const Vector& d, double eta) {
  if (d.size() != img.dim()) throw DimensionMismatch("descriptor dimension mismatch");
  Heatmap h;
  h.width = img.width;
  h.height = img.height;
  h.w = (-(img.desc.rowwise() - d.transpose()).rowwise().squaredNorm() / (eta * eta))
            .array()
            .exp();
  return h;
}

inline Heatmap normalize(const Heatmap& h) {
  double s = h.w.sum();
  if (s <= 0.0) throw DegenerateHeatmap("heatmap has no mass");
  Heatmap out = h;
  out.w /= s;
  out.normalized = true;
  return out;
}

// 2D spatial expectation over pixel coordinates (ix, iy)
inline Vec2 spatial_expectation_pixel(const DescriptorImage& img, const Vector& d, double eta) {
  Heatmap h = heatmap(img, d, eta);
  double s = h.w.sum();
  if (s <= 0.0) throw DegenerateHeatmap("heatmap has no mass");
  double su = 0.0, sv = 0.0;
  int ip = 0;
  for (int iy = 0; iy < img.height; ++iy) {
    for (int ix = 0; ix < img.width; ++ix, ++ip) {
      su += ix * h.w(ip);
      sv += iy * h.w(ip);
    }
  }
  return {su / s, sv / s};
}

// depth expectation; heatmap mass renormalized over valid-depth pixels
inline double spatial_expectation_z(const DescriptorImage& img, const Vector& d, double eta) {
  Heatmap h = heatmap(img, d, eta);
  double s = 0.0, sz = 0.0;
  for (int ip = 0; ip < img.pixels(); ++ip) {
    if (!img.valid_depth(ip)) continue;
    s += h.w(ip);
    sz += h.w(ip) * img.depth(ip);
  }
  if (s <= 0.0) throw NoValidDepth("no valid-depth pixel carries heatmap mass");
  return sz / s;
}

// Localize d in the image: pixel expectation, depth expectation unprojected
// to the world frame, and confidence = unnormalized heatmap at the rounded
// expectation pixel.
inline Correspondence correspond(const DescriptorImage& img, const Vector& d, double eta,
                                 const CameraModel& cam) {
  Heatmap h = heatmap(img, d, eta);
  double s = h.w.sum();
  if (s <= 0.0) throw DegenerateHeatmap("heatmap has no mass");
  double su = 0.0, sv = 0.0, sd = 0.0, sdw = 0.0;
  int ip = 0;
  for (int iy = 0; iy < img.height; ++iy) {
    for (int ix = 0; ix < img.width; ++ix, ++ip) {
      su += ix * h.w(ip);
      sv += iy * h.w(ip);
      if (img.depth(ip) >= 0.0) {
        sdw += h.w(ip);
        sd += h.w(ip) * img.depth(ip);
      }
    }
  }
  Correspondence c;
  c.u = su / s;
  c.v = sv / s;
  if (sdw <= 0.0) throw NoValidDepth("no valid-depth pixel carries heatmap mass");
  double depth = sd / sdw;
  c.world = cam.unproject(c.u, c.v, depth);
  int iu = std::clamp(static_cast<int>(std::lround(c.u)), 0, img.width - 1);
  int iv = std::clamp(static_cast<int>(std::lround(c.v)), 0, img.height - 1);
  c.confidence = h.w(img.index(iu, iv));
  return c;
}

// target heatmap exp(-|p - p*|^2 / sigma^2) on the pixel lattice
inline Heatmap gaussian_target(int width, int height, const Vec2& p_star, double sigma) {
  Heatmap h;
  h.width = width;
  h.height = height;
  h.w.resize(width * height);
  int ip = 0;
  for (int iy = 0; iy < height; ++iy) {
    for (int ix = 0; ix < width; ++ix, ++ip) {
      double du = ix - p_star.x(), dv = iy - p_star.y();
      h.w(ip) = std::exp(-(du * du + dv * dv) / (sigma * sigma));
    }
  }
  return h;
}

// MSE with mean reduction between unnormalized heatmaps
inline double heatmap_loss(const Heatmap& pred, const Heatmap& target) {
  if (pred.w.size() != target.w.size()) throw DimensionMismatch("heatmap sizes differ");
  return (pred.w - target.w).squaredNorm() / static_cast<double>(pred.w.size());
}

struct SpatialLosses {
  double pixel = 0.0;
  double z = 0.0;
};

// L1 distances between expectations and their targets
inline SpatialLosses spatial_losses(const DescriptorImage& img, const Vector& d, double eta,
                                    const Vec2& p_star, double z_star) {
  Vec2 jp = spatial_expectation_pixel(img, d, eta);
  double jz = spatial_expectation_z(img, d, eta);
  return {std::abs(jp.x() - p_star.x()) + std::abs(jp.y() - p_star.y()), std::abs(jz - z_star)};
}

struct LossParts {
  double heatmap = 0.0;
  double spatial_pixel = 0.0;
  double spatial_z = 0.0;
};

inline double total_loss(const LossParts& parts, double w_heatmap, double w_spatial) {
  return w_heatmap * parts.heatmap + w_spatial * (parts.spatial_pixel + parts.spatial_z);
}

}  // namespace keydyn::vision
