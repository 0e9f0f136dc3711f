#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "keydyn/core/errors.hpp"

namespace keydyn::vision {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense descriptor field with a depth channel and an object mask.
// Pixels are indexed ip = iy * width + ix; descriptors are the rows of
// `desc`. Depth < 0 marks invalid depth, which coincides with mask == 0.
struct DescriptorImage {
  int width = 0;
  int height = 0;
  Matrix desc;                // (width*height) x D
  Vector depth;               // camera-frame z, meters; < 0 invalid
  std::vector<uint8_t> mask;  // 1 on object pixels

  int pixels() const { return width * height; }
  int dim() const { return static_cast<int>(desc.cols()); }

  int index(int ix, int iy) const { return iy * width + ix; }
  bool valid_depth(int ip) const { return depth(ip) >= 0.0; }

  int mask_count() const {
    int n = 0;
    for (uint8_t m : mask) n += m;
    return n;
  }
};

// heatmap weights over pixels; unnormalized entries lie in [0, 1]
struct Heatmap {
  int width = 0;
  int height = 0;
  Vector w;
  bool normalized = false;

  int pixels() const { return width * height; }
};

// localized descriptor: continuous pixel, world point, match confidence
struct Correspondence {
  double u = 0.0;
  double v = 0.0;
  Eigen::Vector3d world = Eigen::Vector3d::Zero();
  double confidence = 0.0;
};

}  // namespace keydyn::vision
