#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "keydyn/core/errors.hpp"

namespace keydyn::dyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Reverse-mode tape over dense matrices. Nodes are appended in evaluation
// order, so insertion order is already a topological order; backward() walks
// it once in reverse. Ops are the small fixed set needed by the MLP rollout
// loss, the keypoint-mixing path, and the descriptor-image losses.
class Tape {
 public:
  using NodeId = int;

  NodeId constant(Matrix v) { return push(Op::kLeaf, std::move(v), -1, -1, false); }

  NodeId param(Matrix v) { return push(Op::kLeaf, std::move(v), -1, -1, true); }

  NodeId matmul(NodeId a, NodeId b) {
    check_cols_rows(a, b);
    return push(Op::kMatmul, val(a) * val(b), a, b);
  }

  NodeId add(NodeId a, NodeId b) {
    check_same_shape(a, b);
    return push(Op::kAdd, val(a) + val(b), a, b);
  }

  NodeId sub(NodeId a, NodeId b) {
    check_same_shape(a, b);
    return push(Op::kSub, val(a) - val(b), a, b);
  }

  NodeId mul(NodeId a, NodeId b) {
    check_same_shape(a, b);
    return push(Op::kMul, val(a).cwiseProduct(val(b)), a, b);
  }

  // M + row broadcast over rows of M
  NodeId add_row(NodeId m, NodeId row) {
    if (val(row).rows() != 1 || val(m).cols() != val(row).cols())
      throw DimensionMismatch("add_row shape mismatch");
    return push(Op::kAddRow, val(m).rowwise() + val(row).row(0), m, row);
  }

  NodeId relu(NodeId a) { return push(Op::kRelu, val(a).cwiseMax(0.0), a, -1); }

  // exp(c * x) elementwise
  NodeId exp_scale(NodeId a, double c) {
    Node& n = nodes_[push(Op::kExpScale, (c * val(a).array()).exp().matrix(), a, -1)];
    n.c0 = c;
    return n.id;
  }

  NodeId scale(NodeId a, double c) {
    Node& n = nodes_[push(Op::kScale, c * val(a), a, -1)];
    n.c0 = c;
    return n.id;
  }

  // column vector of squared row norms
  NodeId rowwise_sqnorm(NodeId a) {
    return push(Op::kRowSqNorm, val(a).rowwise().squaredNorm(), a, -1);
  }

  NodeId sum(NodeId a) { return push(Op::kSum, scalar(val(a).sum()), a, -1); }

  // sum(a .* b), scalar
  NodeId dot(NodeId a, NodeId b) {
    check_same_shape(a, b);
    return push(Op::kDot, scalar(val(a).cwiseProduct(val(b)).sum()), a, b);
  }

  // M / s with scalar node s
  NodeId div_scalar(NodeId m, NodeId s) {
    if (val(s).size() != 1) throw DimensionMismatch("div_scalar expects a scalar divisor");
    return push(Op::kDivScalar, val(m) / val(s)(0, 0), m, s);
  }

  // numerically stable row softmax
  NodeId softmax_rows(NodeId a) {
    Matrix v = val(a);
    for (int r = 0; r < v.rows(); ++r) {
      Eigen::RowVectorXd row = v.row(r);
      double m = row.maxCoeff();
      row = (row.array() - m).exp();
      v.row(r) = row / row.sum();
    }
    return push(Op::kSoftmaxRows, std::move(v), a, -1);
  }

  NodeId hconcat(const std::vector<NodeId>& parts) {
    if (parts.empty()) throw DimensionMismatch("hconcat of nothing");
    Eigen::Index rows = val(parts[0]).rows(), cols = 0;
    for (NodeId p : parts) {
      if (val(p).rows() != rows) throw DimensionMismatch("hconcat row mismatch");
      cols += val(p).cols();
    }
    Matrix v(rows, cols);
    Eigen::Index at = 0;
    for (NodeId p : parts) {
      v.middleCols(at, val(p).cols()) = val(p);
      at += val(p).cols();
    }
    NodeId id = push(Op::kHConcat, std::move(v), -1, -1);
    nodes_[id].srcs = parts;
    nodes_[id].needs_grad = false;
    for (NodeId p : parts) nodes_[id].needs_grad |= nodes_[p].needs_grad;
    return id;
  }

  NodeId cols(NodeId a, int begin, int n) {
    NodeId id = push(Op::kCols, val(a).middleCols(begin, n), a, -1);
    nodes_[id].i0 = begin;
    nodes_[id].i1 = n;
    return id;
  }

  NodeId transpose(NodeId a) { return push(Op::kTranspose, val(a).transpose(), a, -1); }

  // Batched convex keypoint mixing. W is (K x K); samples[s] is (K x B).
  // Row s of the result is vec(W * samples[s]) laid out keypoint-major.
  NodeId mix_batch(NodeId w, std::vector<Matrix> samples) {
    const Matrix& W = val(w);
    if (samples.empty()) throw DimensionMismatch("mix_batch with no samples");
    const int K = static_cast<int>(W.rows());
    const int B = static_cast<int>(samples[0].cols());
    Matrix v(static_cast<int>(samples.size()), K * B);
    for (size_t s = 0; s < samples.size(); ++s) {
      if (samples[s].rows() != K) throw DimensionMismatch("mix_batch keypoint count mismatch");
      Matrix mixed = W * samples[s];
      for (int k = 0; k < K; ++k)
        for (int b = 0; b < B; ++b) v(static_cast<int>(s), k * B + b) = mixed(k, b);
    }
    NodeId id = push(Op::kMixBatch, std::move(v), w, -1);
    nodes_[id].samples = std::move(samples);
    return id;
  }

  // sum((a-b)^2), scalar
  NodeId sumsq_diff(NodeId a, NodeId b) {
    check_same_shape(a, b);
    return push(Op::kSumSqDiff, scalar((val(a) - val(b)).squaredNorm()), a, b);
  }

  // sum(|a-b|), scalar
  NodeId abs_sum_diff(NodeId a, NodeId b) {
    check_same_shape(a, b);
    return push(Op::kAbsSumDiff, scalar((val(a) - val(b)).cwiseAbs().sum()), a, b);
  }

  const Matrix& value(NodeId id) const { return nodes_[id].value; }

  double scalar_value(NodeId id) const {
    if (nodes_[id].value.size() != 1) throw DimensionMismatch("node is not a scalar");
    return nodes_[id].value(0, 0);
  }

  // valid after backward(); zero matrix for params the root never touched
  const Matrix& grad(NodeId id) const {
    const Node& n = nodes_[id];
    if (n.grad.size() == 0) {
      grad_zero_.resize(n.value.rows(), n.value.cols());
      grad_zero_.setZero();
      return grad_zero_;
    }
    return n.grad;
  }

  void backward(NodeId root) {
    if (nodes_[root].value.size() != 1) throw DimensionMismatch("backward root must be scalar");
    nodes_[root].grad = scalar(1.0);
    for (int id = root; id >= 0; --id) {
      Node& n = nodes_[id];
      if (!n.needs_grad || n.grad.size() == 0) continue;
      pull(n);
    }
  }

  size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kLeaf,
    kMatmul,
    kAdd,
    kSub,
    kMul,
    kAddRow,
    kRelu,
    kExpScale,
    kScale,
    kRowSqNorm,
    kSum,
    kDot,
    kDivScalar,
    kSoftmaxRows,
    kHConcat,
    kCols,
    kTranspose,
    kMixBatch,
    kSumSqDiff,
    kAbsSumDiff,
  };

  struct Node {
    Op op;
    NodeId id = -1;
    NodeId a = -1, b = -1;
    std::vector<NodeId> srcs;
    std::vector<Matrix> samples;
    double c0 = 0.0;
    int i0 = 0, i1 = 0;
    bool needs_grad = false;
    Matrix value;
    Matrix grad;
  };

  static Matrix scalar(double x) {
    Matrix m(1, 1);
    m(0, 0) = x;
    return m;
  }

  const Matrix& val(NodeId id) const { return nodes_[id].value; }

  void check_same_shape(NodeId a, NodeId b) const {
    if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
      throw DimensionMismatch("operand shapes differ");
  }

  void check_cols_rows(NodeId a, NodeId b) const {
    if (val(a).cols() != val(b).rows()) throw DimensionMismatch("matmul inner dims differ");
  }

  NodeId push(Op op, Matrix v, NodeId a, NodeId b, bool leaf_param = false) {
    Node n;
    n.op = op;
    n.id = static_cast<NodeId>(nodes_.size());
    n.a = a;
    n.b = b;
    n.value = std::move(v);
    if (op == Op::kLeaf) {
      n.needs_grad = leaf_param;
    } else {
      n.needs_grad = (a >= 0 && nodes_[a].needs_grad) || (b >= 0 && nodes_[b].needs_grad);
    }
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  Matrix& grad_buf(NodeId id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) {
      n.grad.resize(n.value.rows(), n.value.cols());
      n.grad.setZero();
    }
    return n.grad;
  }

  void accum(NodeId id, const Matrix& g) {
    if (id < 0 || !nodes_[id].needs_grad) return;
    grad_buf(id) += g;
  }

  void pull(Node& n) {
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatmul:
        accum(n.a, g * val(n.b).transpose());
        accum(n.b, val(n.a).transpose() * g);
        break;
      case Op::kAdd:
        accum(n.a, g);
        accum(n.b, g);
        break;
      case Op::kSub:
        accum(n.a, g);
        accum(n.b, -g);
        break;
      case Op::kMul:
        accum(n.a, g.cwiseProduct(val(n.b)));
        accum(n.b, g.cwiseProduct(val(n.a)));
        break;
      case Op::kAddRow:
        accum(n.a, g);
        accum(n.b, g.colwise().sum());
        break;
      case Op::kRelu:
        accum(n.a, g.cwiseProduct((n.value.array() > 0.0).cast<double>().matrix()));
        break;
      case Op::kExpScale:
        accum(n.a, n.c0 * g.cwiseProduct(n.value));
        break;
      case Op::kScale:
        accum(n.a, n.c0 * g);
        break;
      case Op::kRowSqNorm:
        accum(n.a, 2.0 * val(n.a).cwiseProduct(g.col(0).replicate(1, val(n.a).cols())));
        break;
      case Op::kSum:
        accum(n.a, Matrix::Constant(val(n.a).rows(), val(n.a).cols(), g(0, 0)));
        break;
      case Op::kDot:
        accum(n.a, g(0, 0) * val(n.b));
        accum(n.b, g(0, 0) * val(n.a));
        break;
      case Op::kDivScalar: {
        double s = val(n.b)(0, 0);
        accum(n.a, g / s);
        accum(n.b, scalar(-g.cwiseProduct(n.value).sum() / s));
        break;
      }
      case Op::kSoftmaxRows: {
        Matrix gx = n.value.cwiseProduct(g);
        Vector row_dot = gx.rowwise().sum();
        gx -= n.value.cwiseProduct(row_dot.replicate(1, n.value.cols()));
        accum(n.a, gx);
        break;
      }
      case Op::kHConcat: {
        Eigen::Index at = 0;
        for (NodeId p : n.srcs) {
          accum(p, g.middleCols(at, val(p).cols()));
          at += val(p).cols();
        }
        break;
      }
      case Op::kCols: {
        Matrix gx = Matrix::Zero(val(n.a).rows(), val(n.a).cols());
        gx.middleCols(n.i0, n.i1) = g;
        accum(n.a, gx);
        break;
      }
      case Op::kTranspose:
        accum(n.a, g.transpose());
        break;
      case Op::kMixBatch: {
        const int K = static_cast<int>(val(n.a).rows());
        const int B = static_cast<int>(n.samples[0].cols());
        Matrix gw = Matrix::Zero(K, K);
        for (size_t s = 0; s < n.samples.size(); ++s) {
          Matrix gm(K, B);
          for (int k = 0; k < K; ++k)
            for (int b = 0; b < B; ++b) gm(k, b) = g(static_cast<int>(s), k * B + b);
          gw += gm * n.samples[s].transpose();
        }
        accum(n.a, gw);
        break;
      }
      case Op::kSumSqDiff: {
        Matrix d = 2.0 * g(0, 0) * (val(n.a) - val(n.b));
        accum(n.a, d);
        accum(n.b, -d);
        break;
      }
      case Op::kAbsSumDiff: {
        Matrix sgn = (val(n.a) - val(n.b)).array().sign().matrix();
        accum(n.a, g(0, 0) * sgn);
        accum(n.b, -g(0, 0) * sgn);
        break;
      }
    }
  }

  std::vector<Node> nodes_;
  mutable Matrix grad_zero_;
};

// Central-difference comparison for any scalar function built on the tape.
// `build` must rebuild the full graph from the leaf parameter values; the
// check perturbs entries of each parameter in turn.
struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  int worst_param = -1;
  long worst_entry = -1;
};

template <typename BuildFn>
GradCheckReport grad_check(const BuildFn& build, std::vector<Matrix> params, double step = 1e-5) {
  Tape tape;
  std::vector<Tape::NodeId> ids;
  ids.reserve(params.size());
  for (const Matrix& p : params) ids.push_back(tape.param(p));
  Tape::NodeId root = build(tape, ids);
  tape.backward(root);

  GradCheckReport report;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    const Matrix analytic = tape.grad(ids[pi]);
    for (long e = 0; e < params[pi].size(); ++e) {
      auto eval = [&](double delta) {
        std::vector<Matrix> shifted = params;
        shifted[pi].data()[e] += delta;
        Tape t2;
        std::vector<Tape::NodeId> ids2;
        for (const Matrix& p : shifted) ids2.push_back(t2.param(p));
        return t2.scalar_value(build(t2, ids2));
      };
      double fd = (eval(step) - eval(-step)) / (2.0 * step);
      double an = analytic.data()[e];
      double abs_err = std::abs(fd - an);
      double rel = abs_err / std::max(std::abs(fd) + std::abs(an), 1e-6);
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = static_cast<int>(pi);
        report.worst_entry = e;
      }
      report.max_abs_err = std::max(report.max_abs_err, abs_err);
    }
  }
  return report;
}

}  // namespace keydyn::dyn
