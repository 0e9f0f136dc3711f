#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "keydyn/core/errors.hpp"
#include "keydyn/core/io.hpp"
#include "keydyn/core/rng.hpp"
#include "keydyn/dynamics/tape.hpp"

namespace keydyn::dyn {

enum class Method : uint8_t { kDS = 0, kSDS = 1, kWDS = 2, kWSDS = 3, kGT3D = 4 };

inline bool method_uses_weights(Method m) { return m == Method::kWDS || m == Method::kWSDS; }

inline std::string method_name(Method m) {
  switch (m) {
    case Method::kDS: return "DS";
    case Method::kSDS: return "SDS";
    case Method::kWDS: return "WDS";
    case Method::kWSDS: return "WSDS";
    case Method::kGT3D: return "GT_3D";
  }
  return "?";
}

inline Method method_from_name(const std::string& s) {
  if (s == "DS") return Method::kDS;
  if (s == "SDS") return Method::kSDS;
  if (s == "WDS") return Method::kWDS;
  if (s == "WSDS") return Method::kWSDS;
  if (s == "GT_3D" || s == "GT3D") return Method::kGT3D;
  throw Error("unknown method: " + s);
}

// two ReLU hidden layers; rows of the input batch are samples; biases kept
// as 1xN matrices so every trainable block has the same type
struct MlpParams {
  Matrix w1, b1, w2, b2, w3, b3;

  int in_dim() const { return static_cast<int>(w1.rows()); }
  int out_dim() const { return static_cast<int>(w3.cols()); }

  static MlpParams he_init(int in, int hidden, int out, Rng& rng) {
    MlpParams p;
    auto fill = [&rng](Matrix& m, int r, int c) {
      m.resize(r, c);
      double std = std::sqrt(2.0 / r);
      for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.gaussian(0.0, std);
    };
    fill(p.w1, in, hidden);
    fill(p.w2, hidden, hidden);
    fill(p.w3, hidden, out);
    p.b1 = Matrix::Zero(1, hidden);
    p.b2 = Matrix::Zero(1, hidden);
    p.b3 = Matrix::Zero(1, out);
    return p;
  }

  Matrix forward(const Matrix& x) const {
    if (x.cols() != w1.rows()) throw DimensionMismatch("mlp input width mismatch");
    Matrix h1 = ((x * w1).rowwise() + b1.row(0)).cwiseMax(0.0);
    Matrix h2 = ((h1 * w2).rowwise() + b2.row(0)).cwiseMax(0.0);
    return (h2 * w3).rowwise() + b3.row(0);
  }

  // same computation on the tape
  Tape::NodeId forward_graph(Tape& tape, Tape::NodeId x,
                             const std::array<Tape::NodeId, 6>& p) const {
    auto h1 = tape.relu(tape.add_row(tape.matmul(x, p[0]), p[1]));
    auto h2 = tape.relu(tape.add_row(tape.matmul(h1, p[2]), p[3]));
    return tape.add_row(tape.matmul(h2, p[4]), p[5]);
  }

  std::array<Tape::NodeId, 6> params_on(Tape& tape) const {
    return {tape.param(w1), tape.param(b1), tape.param(w2),
            tape.param(b2), tape.param(w3), tape.param(b3)};
  }
};

// Latent dynamics over z = (z_object, o_robot) with one step of history:
// z_next = mlp(z_t, z_{t-1}, a_t). Methods with learnable mixing carry the
// weight logits alpha alongside the MLP.
struct DynamicsModel {
  Method method = Method::kDS;
  int latent_dim = 0;  // dim(z) including the robot block
  int action_dim = 2;
  int num_keypoints = 0;  // K
  int point_dim = 0;      // B
  MlpParams mlp;
  Matrix alpha;  // K x K, present iff method uses weights
  uint64_t config_fingerprint = 0;

  bool has_alpha() const { return alpha.size() > 0; }

  int input_dim() const { return 2 * latent_dim + action_dim; }

  static DynamicsModel init(Method method, int num_keypoints, int point_dim, int hidden,
                            double alpha_init_diag, Rng& rng) {
    DynamicsModel m;
    m.method = method;
    m.num_keypoints = num_keypoints;
    m.point_dim = point_dim;
    m.latent_dim = num_keypoints * point_dim + 2;
    m.mlp = MlpParams::he_init(m.input_dim(), hidden, m.latent_dim, rng);
    if (method_uses_weights(method)) {
      m.alpha = Matrix::Zero(num_keypoints, num_keypoints);
      m.alpha.diagonal().setConstant(alpha_init_diag);
    }
    return m;
  }

  Matrix mix_weights() const {
    if (!has_alpha()) throw MissingWeights("model has no mixing weights");
    Matrix w = alpha;
    for (int r = 0; r < w.rows(); ++r) {
      Eigen::RowVectorXd row = w.row(r);
      double mx = row.maxCoeff();
      row = (row.array() - mx).exp();
      w.row(r) = row / row.sum();
    }
    return w;
  }

  // z_next for a batch: rows are independent samples
  Matrix forward_batch(const Matrix& z_t, const Matrix& z_prev, const Matrix& a) const {
    if (z_t.cols() != latent_dim || z_prev.cols() != latent_dim || a.cols() != action_dim)
      throw DimensionMismatch("dynamics input width mismatch");
    Matrix x(z_t.rows(), input_dim());
    x << z_t, z_prev, a;
    return mlp.forward(x);
  }

  Vector forward(const Vector& z_t, const Vector& z_prev, const Vector& a) const {
    Matrix out = forward_batch(z_t.transpose(), z_prev.transpose(), a.transpose());
    return out.row(0).transpose();
  }

  // open-loop recursion feeding predictions back as history
  std::vector<Vector> rollout(const Vector& z0, const Vector& z_prev,
                              const std::vector<Vector>& actions) const {
    std::vector<Vector> out;
    out.reserve(actions.size());
    Vector cur = z0, prev = z_prev;
    for (const Vector& a : actions) {
      Vector next = forward(cur, prev, a);
      out.push_back(next);
      prev = cur;
      cur = next;
    }
    return out;
  }

  std::vector<Matrix*> trainable() {
    std::vector<Matrix*> p{&mlp.w1, &mlp.b1, &mlp.w2, &mlp.b2, &mlp.w3, &mlp.b3};
    if (has_alpha()) p.push_back(&alpha);
    return p;
  }
};

constexpr char kModelMagic[6] = {'K', 'D', 'Y', 'N', 'M', '1'};

inline void save_model(const DynamicsModel& m, const std::filesystem::path& path) {
  BinaryWriter w(path);
  w.write_bytes(kModelMagic, sizeof(kModelMagic));
  w.write<uint16_t>(1);  // version
  w.write<uint8_t>(static_cast<uint8_t>(m.method));
  w.write<uint8_t>(m.has_alpha() ? 1 : 0);
  w.write<int32_t>(m.latent_dim);
  w.write<int32_t>(m.action_dim);
  w.write<int32_t>(m.num_keypoints);
  w.write<int32_t>(m.point_dim);
  w.write<int32_t>(static_cast<int32_t>(m.mlp.w1.cols()));  // hidden
  w.write<uint64_t>(m.config_fingerprint);
  auto dump = [&w](const Matrix& mat) { w.write_array(mat.data(), mat.size()); };
  dump(m.mlp.w1);
  dump(m.mlp.b1);
  dump(m.mlp.w2);
  dump(m.mlp.b2);
  dump(m.mlp.w3);
  dump(m.mlp.b3);
  if (m.has_alpha()) dump(m.alpha);
  w.close();
}

inline DynamicsModel load_model(const std::filesystem::path& path) {
  BinaryReader r(path);
  char magic[6];
  r.read_array(magic, 6);
  if (std::memcmp(magic, kModelMagic, 6) != 0) throw IoError("not a model checkpoint");
  if (r.read<uint16_t>() != 1) throw IoError("unsupported checkpoint version");
  DynamicsModel m;
  m.method = static_cast<Method>(r.read<uint8_t>());
  bool with_alpha = r.read<uint8_t>() != 0;
  m.latent_dim = r.read<int32_t>();
  m.action_dim = r.read<int32_t>();
  m.num_keypoints = r.read<int32_t>();
  m.point_dim = r.read<int32_t>();
  int hidden = r.read<int32_t>();
  m.config_fingerprint = r.read<uint64_t>();
  auto slurp = [&r](Matrix& mat, int rows, int cols) {
    mat.resize(rows, cols);
    r.read_array(mat.data(), mat.size());
  };
  slurp(m.mlp.w1, m.input_dim(), hidden);
  slurp(m.mlp.b1, 1, hidden);
  slurp(m.mlp.w2, hidden, hidden);
  slurp(m.mlp.b2, 1, hidden);
  slurp(m.mlp.w3, hidden, m.latent_dim);
  slurp(m.mlp.b3, 1, m.latent_dim);
  if (with_alpha) slurp(m.alpha, m.num_keypoints, m.num_keypoints);
  return m;
}

}  // namespace keydyn::dyn
