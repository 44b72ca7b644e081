#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "imexhdg/errors.hpp"
#include "imexhdg/mesh.hpp"

namespace imexhdg {

inline constexpr int min_order = 1;
inline constexpr int max_order = 8;

namespace detail {

/// Legendre polynomial P_n and its derivative at x via the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p_prev = 1.0, p = x;
  double dp_prev = 0.0, dp = 1.0;
  if (n == 0)
    return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
    const double dp_next = dp_prev + (2.0 * k + 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

} // namespace detail

struct GllRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Lobatto-Legendre nodes and weights for degree p (p+1 points).
/// Interior nodes are the roots of P'_p found by Newton iteration; weights
/// follow 2 / (p(p+1) P_p(x)^2).
inline GllRule gll(int p) {
  if (p < min_order || p > max_order)
    throw unsupported_order("polynomial order " + std::to_string(p) + " outside [1, 8]");
  const int n = p + 1;
  GllRule rule;
  rule.nodes.assign(std::size_t(n), 0.0);
  rule.weights.assign(std::size_t(n), 0.0);
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;

  for (int k = 1; k < p; ++k) {
    double x = -std::cos(M_PI * double(k) / double(p));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dpn] = detail::legendre(p, x);
      // (1 - x^2) P'' = 2x P' - p(p+1) P
      const double d2pn = (2.0 * x * dpn - p * (p + 1.0) * pn) / (1.0 - x * x);
      const double dx = dpn / d2pn;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    rule.nodes[std::size_t(k)] = x;
  }
  // exact mirror symmetry
  for (int k = 0; k < n / 2; ++k) {
    const double s = 0.5 * (rule.nodes[std::size_t(p - k)] - rule.nodes[std::size_t(k)]);
    rule.nodes[std::size_t(k)] = -s;
    rule.nodes[std::size_t(p - k)] = s;
  }
  if (n % 2 == 1)
    rule.nodes[std::size_t(p / 2)] = 0.0;

  for (int k = 0; k < n; ++k) {
    const double pn = detail::legendre(p, rule.nodes[std::size_t(k)]).first;
    rule.weights[std::size_t(k)] = 2.0 / (p * (p + 1.0) * pn * pn);
  }
  return rule;
}

/// 1-D nodal basis on GLL points: D(i, j) = l_j'(x_i).
class NodalBasis {
public:
  explicit NodalBasis(int p) : order_(p) {
    auto rule = gll(p);
    nodes_ = std::move(rule.nodes);
    weights_ = std::move(rule.weights);
    const int n = p + 1;
    diff_ = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> pn(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      pn[std::size_t(i)] = detail::legendre(p, nodes_[std::size_t(i)]).first;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        if (i == j)
          continue;
        const double d = pn[std::size_t(i)] /
                         (pn[std::size_t(j)] * (nodes_[std::size_t(i)] - nodes_[std::size_t(j)]));
        diff_(i, j) = d;
        row += d;
      }
      // negative-sum trick: rows annihilate constants to roundoff
      diff_(i, i) = -row;
    }
  }

  int order() const { return order_; }
  int num_nodes_1d() const { return order_ + 1; }
  int num_nodes() const { return (order_ + 1) * (order_ + 1); }
  const std::vector<double> &nodes() const { return nodes_; }
  const std::vector<double> &weights() const { return weights_; }
  const Eigen::MatrixXd &diff_matrix() const { return diff_; }

  /// Volume node index of tensor node (i along x, j along y).
  int node(int i, int j) const { return j * (order_ + 1) + i; }

  /// Volume node lying at position f (in increasing tangential coordinate) on a side.
  int side_node(int side, int f) const {
    switch (side) {
    case south: return node(f, 0);
    case east: return node(order_, f);
    case north: return node(f, order_);
    case west: return node(0, f);
    default: throw invalid_argument("side index out of range");
    }
  }

private:
  int order_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Eigen::MatrixXd diff_;
};

inline Eigen::MatrixXd diff_matrix(const NodalBasis &basis) { return basis.diff_matrix(); }

/// Element operators of an affine rectangle under GLL collocation.
///  mass_diag(k)     = w_i w_j J
///  weak_dx(k, m)    = sum_q w_q J (d l_k / dx)(x_q) delta_qm, i.e. the matrix of
///                     f -> (int dv_k/dx f)_k; weak_dy analogous
///  face_weights[s]  = w_f * |side| / 2, the face quadrature used by lifts
struct ElementOperators {
  double jacobian = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  Eigen::VectorXd mass_diag;
  Eigen::MatrixXd weak_dx;
  Eigen::MatrixXd weak_dy;
  std::array<Eigen::VectorXd, 4> face_weights;

  /// Adds face-node values `g` on `side` into a volume residual.
  template <class Residual, class FaceValues>
  void lift(const NodalBasis &basis, int side, const FaceValues &g, Residual &r) const {
    for (int f = 0; f < basis.num_nodes_1d(); ++f)
      r[basis.side_node(side, f)] += face_weights[std::size_t(side)][f] * g[f];
  }
};

inline ElementOperators element_operators(const NodalBasis &basis, const Element &element) {
  const double hx = element.hx();
  const double hy = element.hy();
  if (!(hx > 0.0) || !(hy > 0.0))
    throw invalid_argument("degenerate element");
  const int n1 = basis.num_nodes_1d();
  const int n = basis.num_nodes();
  const auto &w = basis.weights();
  const auto &d = basis.diff_matrix();

  ElementOperators ops;
  ops.hx = hx;
  ops.hy = hy;
  ops.jacobian = 0.25 * hx * hy;
  ops.mass_diag.resize(n);
  ops.weak_dx = Eigen::MatrixXd::Zero(n, n);
  ops.weak_dy = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n1; ++i) {
      const int k = basis.node(i, j);
      ops.mass_diag[k] = w[std::size_t(i)] * w[std::size_t(j)] * ops.jacobian;
      for (int q = 0; q < n1; ++q) {
        ops.weak_dx(k, basis.node(q, j)) =
            w[std::size_t(q)] * w[std::size_t(j)] * ops.jacobian * (2.0 / hx) * d(q, i);
        ops.weak_dy(k, basis.node(i, q)) =
            w[std::size_t(i)] * w[std::size_t(q)] * ops.jacobian * (2.0 / hy) * d(q, j);
      }
    }
  for (int s = 0; s < 4; ++s) {
    const double len = (s == east || s == west) ? hy : hx;
    ops.face_weights[std::size_t(s)].resize(n1);
    for (int f = 0; f < n1; ++f)
      ops.face_weights[std::size_t(s)][f] = w[std::size_t(f)] * 0.5 * len;
  }
  return ops;
}

} // namespace imexhdg
