#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imexhdg/errors.hpp"

namespace imexhdg {

/// Additive Butcher pair sharing one stage count. Explicit part is strictly
/// lower triangular, implicit part lower triangular.
struct ImexTableau {
  std::string name;
  int stages = 0;
  Eigen::MatrixXd a_ex, a_im;
  Eigen::VectorXd b_ex, b_im;
  Eigen::VectorXd c_ex, c_im;
  int order = 0;
  bool stiffly_accurate = false;

  /// Throws invalid_argument if the structural invariants do not hold.
  void validate(double tol = 1e-14) const {
    const auto s = Eigen::Index(stages);
    if (a_ex.rows() != s || a_ex.cols() != s || a_im.rows() != s || a_im.cols() != s ||
        b_ex.size() != s || b_im.size() != s || c_ex.size() != s || c_im.size() != s)
      throw invalid_argument(name + ": inconsistent tableau dimensions");
    if (std::abs(b_ex.sum() - 1.0) > tol || std::abs(b_im.sum() - 1.0) > tol)
      throw invalid_argument(name + ": weights do not sum to one");
    for (Eigen::Index i = 0; i < s; ++i) {
      if (std::abs(a_ex.row(i).sum() - c_ex[i]) > tol || std::abs(a_im.row(i).sum() - c_im[i]) > tol)
        throw invalid_argument(name + ": abscissae are not row sums");
      for (Eigen::Index j = i; j < s; ++j) {
        if (a_ex(i, j) != 0.0)
          throw invalid_argument(name + ": explicit part is not strictly lower triangular");
        if (j > i && a_im(i, j) != 0.0)
          throw invalid_argument(name + ": implicit part is not lower triangular");
      }
    }
    if (stiffly_accurate && ((a_im.row(s - 1).transpose() - b_im).cwiseAbs().maxCoeff() > tol ||
                             (a_ex.row(s - 1).transpose() - b_ex).cwiseAbs().maxCoeff() > tol))
      throw invalid_argument(name + ": flagged stiffly accurate but last rows differ from weights");
  }
};

inline std::vector<std::string> tableau_names() { return {"ars111", "ars222", "ars233"}; }

/// Ascher-Ruuth-Spiteri pairs, padded to a common stage count.
inline ImexTableau tableau(const std::string &name) {
  ImexTableau t;
  t.name = name;
  if (name == "ars111") {
    t.stages = 2;
    t.a_ex = Eigen::MatrixXd{{0.0, 0.0}, {1.0, 0.0}};
    t.b_ex = Eigen::Vector2d(1.0, 0.0);
    t.a_im = Eigen::MatrixXd{{0.0, 0.0}, {0.0, 1.0}};
    t.b_im = Eigen::Vector2d(0.0, 1.0);
    t.order = 1;
    t.stiffly_accurate = true;
  } else if (name == "ars222") {
    const double g = 1.0 - std::sqrt(2.0) / 2.0;
    const double d = 1.0 - 1.0 / (2.0 * g);
    t.stages = 3;
    t.a_ex = Eigen::MatrixXd{{0.0, 0.0, 0.0}, {g, 0.0, 0.0}, {d, 1.0 - d, 0.0}};
    t.b_ex = Eigen::Vector3d(d, 1.0 - d, 0.0);
    t.a_im = Eigen::MatrixXd{{0.0, 0.0, 0.0}, {0.0, g, 0.0}, {0.0, 1.0 - g, g}};
    t.b_im = Eigen::Vector3d(0.0, 1.0 - g, g);
    t.order = 2;
    t.stiffly_accurate = true;
  } else if (name == "ars233") {
    const double g = (3.0 + std::sqrt(3.0)) / 6.0;
    t.stages = 3;
    t.a_ex = Eigen::MatrixXd{{0.0, 0.0, 0.0}, {g, 0.0, 0.0}, {g - 1.0, 2.0 * (1.0 - g), 0.0}};
    t.b_ex = Eigen::Vector3d(0.0, 0.5, 0.5);
    t.a_im = Eigen::MatrixXd{{0.0, 0.0, 0.0}, {0.0, g, 0.0}, {0.0, 1.0 - 2.0 * g, g}};
    t.b_im = Eigen::Vector3d(0.0, 0.5, 0.5);
    t.order = 3;
    t.stiffly_accurate = false;
  } else {
    throw unknown_scheme("unknown IMEX scheme '" + name + "'");
  }
  t.c_ex = t.a_ex.rowwise().sum();
  t.c_im = t.a_im.rowwise().sum();
  t.validate();
  return t;
}

struct OrderCondition {
  std::string label;
  int order = 0;
  double value = 0.0;
  double expected = 0.0;
  double residual = 0.0;
  bool passed = false;
};

struct OrderReport {
  std::string scheme;
  int up_to_order = 0;
  std::vector<OrderCondition> conditions;

  bool all_passed() const {
    for (const auto &c : conditions)
      if (!c.passed)
        return false;
    return true;
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto &c : conditions)
      m = std::max(m, c.residual);
    return m;
  }
};

/// Additive order conditions up to order 3, over every explicit/implicit
/// combination of (b, A, c).
inline OrderReport check_order_conditions(const ImexTableau &t, int up_to_order, double tol = 1e-13) {
  if (up_to_order < 1 || up_to_order > 3)
    throw invalid_argument("order conditions are available for orders 1..3");
  OrderReport rep;
  rep.scheme = t.name;
  rep.up_to_order = up_to_order;
  const Eigen::VectorXd *b[2] = {&t.b_ex, &t.b_im};
  const Eigen::VectorXd *c[2] = {&t.c_ex, &t.c_im};
  const Eigen::MatrixXd *a[2] = {&t.a_ex, &t.a_im};
  const char *tag[2] = {"ex", "im"};
  auto add = [&](std::string label, int order, double value, double expected) {
    OrderCondition oc{std::move(label), order, value, expected, std::abs(value - expected), false};
    oc.passed = oc.residual <= tol;
    rep.conditions.push_back(std::move(oc));
  };
  for (int i = 0; i < 2; ++i)
    add(std::string("sum b_") + tag[i], 1, b[i]->sum(), 1.0);
  if (up_to_order >= 2)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        add(std::string("b_") + tag[i] + ".c_" + tag[j], 2, b[i]->dot(*c[j]), 0.5);
  if (up_to_order >= 3) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          add(std::string("b_") + tag[i] + ".(c_" + tag[j] + "*c_" + tag[k] + ")", 3,
              b[i]->dot(c[j]->cwiseProduct(*c[k])), 1.0 / 3.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          add(std::string("b_") + tag[i] + ".A_" + tag[j] + ".c_" + tag[k], 3,
              b[i]->dot(*a[j] * *c[k]), 1.0 / 6.0);
  }
  return rep;
}

/// A split right-hand side y' = N(y, t) + L(y). `solve_implicit(shift, rhs)`
/// returns Y with Y - shift L(Y) = rhs.
template <class Op>
concept SplitOperator = requires(Op &op, const typename Op::state_type &y, double t, double shift) {
  { op.apply_explicit(y, t) } -> std::convertible_to<typename Op::state_type>;
  { op.solve_implicit(shift, y) } -> std::convertible_to<typename Op::state_type>;
};

template <class Op>
concept ApplicableImplicit = requires(Op &op, const typename Op::state_type &y) {
  { op.apply_implicit(y) } -> std::convertible_to<typename Op::state_type>;
};

/// One additive IMEX-RK step:
///   Q_i = y + dt sum_{j<i} a_ex(i,j) N_j + dt sum_{j<=i} a_im(i,j) L_j
/// The diagonal term is resolved by one implicit solve with shift a_im(i,i) dt,
/// and L_i is recovered from the solved stage as (Q_i - rhs_i) / (a_im(i,i) dt).
/// Solver errors are rethrown with the stage index.
template <SplitOperator Op>
typename Op::state_type imex_step(Op &op, const typename Op::state_type &y, double t, double dt,
                                  const ImexTableau &tab) {
  using S = typename Op::state_type;
  const int s = tab.stages;
  std::vector<std::optional<S>> nex(static_cast<std::size_t>(s)), lim(static_cast<std::size_t>(s));
  S stage = y;
  for (int i = 0; i < s; ++i) {
    try {
      S rhs = y;
      for (int j = 0; j < i; ++j) {
        if (tab.a_ex(i, j) != 0.0)
          rhs = rhs + (dt * tab.a_ex(i, j)) * *nex[std::size_t(j)];
        if (tab.a_im(i, j) != 0.0)
          rhs = rhs + (dt * tab.a_im(i, j)) * *lim[std::size_t(j)];
      }
      const double shift = tab.a_im(i, i) * dt;
      if (shift != 0.0) {
        stage = op.solve_implicit(shift, rhs);
        lim[std::size_t(i)] = (stage - rhs) * (1.0 / shift);
      } else {
        stage = rhs;
        bool needed = tab.b_im[i] != 0.0;
        for (int k = i + 1; k < s; ++k)
          needed = needed || tab.a_im(k, i) != 0.0;
        if (needed) {
          if constexpr (ApplicableImplicit<Op>)
            lim[std::size_t(i)] = op.apply_implicit(stage);
          else
            throw invalid_argument(tab.name + ": explicit implicit-stage needs apply_implicit");
        }
      }
      bool explicit_needed = tab.b_ex[i] != 0.0;
      for (int k = i + 1; k < s; ++k)
        explicit_needed = explicit_needed || tab.a_ex(k, i) != 0.0;
      if (explicit_needed)
        nex[std::size_t(i)] = op.apply_explicit(stage, t + tab.c_ex[i] * dt);
    } catch (const solver_error &err) {
      throw solver_error(std::string(err.what()) + " [stage " + std::to_string(i) + "]", err.residual());
    } catch (const dry_state_error &err) {
      throw err.annotated(" [stage " + std::to_string(i) + "]");
    } catch (const error &err) {
      throw solver_error(std::string(err.what()) + " [stage " + std::to_string(i) + "]");
    }
  }
  if (tab.stiffly_accurate)
    return stage;
  S out = y;
  for (int j = 0; j < s; ++j) {
    if (tab.b_ex[j] != 0.0)
      out = out + (dt * tab.b_ex[j]) * *nex[std::size_t(j)];
    if (tab.b_im[j] != 0.0)
      out = out + (dt * tab.b_im[j]) * *lim[std::size_t(j)];
  }
  return out;
}

} // namespace imexhdg
