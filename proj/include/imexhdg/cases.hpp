#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imexhdg/errors.hpp"
#include "imexhdg/fields.hpp"
#include "imexhdg/mesh.hpp"
#include "imexhdg/swe_model.hpp"

namespace imexhdg {

using InitialState = std::function<State(double, double)>;
using ExactSolution = std::function<State(double, double, double)>;

struct TestCase {
  std::string name;
  Bounds bounds;
  BoundaryKind bc_x = BoundaryKind::wall;
  BoundaryKind bc_y = BoundaryKind::wall;
  ModelParams params;
  InitialState initial_state;
  ExactSolution exact_solution;   // empty when no closed form exists
  ForcingFunction mms_source;     // empty unless manufactured

  bool has_exact() const { return static_cast<bool>(exact_solution); }
};

inline std::vector<std::string> case_names() { return {"lake_at_rest", "standing_wave", "mms_nonlinear"}; }

inline TestCase lake_at_rest(double phi_bar = 1.0) {
  TestCase c;
  c.name = "lake_at_rest";
  c.params.phi_bar = phi_bar;
  c.initial_state = [](double, double) { return State::Zero().eval(); };
  c.exact_solution = [](double, double, double) { return State::Zero().eval(); };
  return c;
}

/// Gravity-wave eigenmode of the linearized system in the unit box with walls:
///   phi' = A cos(pi x) cos(pi y) cos(w t)
///   U    = (A pi phi_bar / w) sin(pi x) cos(pi y) sin(w t)
///   V    = (A pi phi_bar / w) cos(pi x) sin(pi y) sin(w t),   w = pi sqrt(2 phi_bar)
/// Exact for the linear system only; the nonlinear terms are O(A^2).
inline TestCase standing_wave(double phi_bar, double amplitude) {
  if (!(phi_bar > 0.0))
    throw invalid_argument("standing_wave: phi_bar must be positive");
  if (std::abs(amplitude) > 0.01 * phi_bar)
    throw invalid_argument("standing_wave: amplitude must satisfy |A| <= 0.01 phi_bar");
  TestCase c;
  c.name = "standing_wave";
  c.params.phi_bar = phi_bar;
  const double w = M_PI * std::sqrt(2.0 * phi_bar);
  const double m = amplitude * M_PI * phi_bar / w;
  c.exact_solution = [=](double x, double y, double t) {
    const double cx = std::cos(M_PI * x), sx = std::sin(M_PI * x);
    const double cy = std::cos(M_PI * y), sy = std::sin(M_PI * y);
    return State(amplitude * cx * cy * std::cos(w * t), m * sx * cy * std::sin(w * t),
                 m * cx * sy * std::sin(w * t));
  };
  c.initial_state = [exact = c.exact_solution](double x, double y) { return exact(x, y, 0.0); };
  return c;
}

/// Manufactured solution on the doubly periodic unit square:
///   phi' = A sin(2 pi x) sin(2 pi y) cos t
///   U    = A cos(2 pi x) sin(2 pi y) sin t
///   V    = A sin(2 pi x) cos(2 pi y) sin t
/// The source is the residual q_t + div F(q) - S_rot(q) of these fields under
/// the full flux, where S_rot is Coriolis (f0 + beta y) plus drag. With
/// phi = phi_bar + phi', P = (phi^2 - phi_bar^2)/2 and subscripts denoting
/// partial derivatives:
///   R_phi = phi'_t + U_x + V_y
///   R_U   = U_t + (2 U U_x phi - U^2 phi_x)/phi^2 + phi phi_x
///           + ((U_y V + U V_y) phi - U V phi_y)/phi^2 - f V + drag U
///   R_V   = V_t + ((U_x V + U V_x) phi - U V phi_x)/phi^2
///           + (2 V V_y phi - V^2 phi_y)/phi^2 + phi phi_y + f U + drag V
inline TestCase mms_nonlinear(const ModelParams &model, double amplitude) {
  model.validate();
  if (std::abs(amplitude) > 0.1 * model.phi_bar)
    throw invalid_argument("mms_nonlinear: amplitude must satisfy |A| <= 0.1 phi_bar");
  TestCase c;
  c.name = "mms_nonlinear";
  c.bc_x = BoundaryKind::periodic;
  c.bc_y = BoundaryKind::periodic;
  c.params = model;
  c.params.forcing = nullptr;
  const double a = amplitude;
  const double k = 2.0 * M_PI;
  c.exact_solution = [=](double x, double y, double t) {
    const double sx = std::sin(k * x), cx = std::cos(k * x);
    const double sy = std::sin(k * y), cy = std::cos(k * y);
    return State(a * sx * sy * std::cos(t), a * cx * sy * std::sin(t), a * sx * cy * std::sin(t));
  };
  c.initial_state = [exact = c.exact_solution](double x, double y) { return exact(x, y, 0.0); };
  const double phi_bar = model.phi_bar, f0 = model.f0, beta = model.beta, drag = model.drag;
  c.mms_source = [=](double x, double y, double t) {
    const double sx = std::sin(k * x), cx = std::cos(k * x);
    const double sy = std::sin(k * y), cy = std::cos(k * y);
    const double st = std::sin(t), ct = std::cos(t);
    const double ph = a * sx * sy * ct;
    const double ph_t = -a * sx * sy * st;
    const double ph_x = a * k * cx * sy * ct;
    const double ph_y = a * k * sx * cy * ct;
    const double u = a * cx * sy * st, u_t = a * cx * sy * ct;
    const double u_x = -a * k * sx * sy * st, u_y = a * k * cx * cy * st;
    const double v = a * sx * cy * st, v_t = a * sx * cy * ct;
    const double v_x = a * k * cx * cy * st, v_y = -a * k * sx * sy * st;
    const double phi = phi_bar + ph;
    const double phi2 = phi * phi;
    const double f = f0 + beta * y;
    const double r_phi = ph_t + u_x + v_y;
    const double r_u = u_t + (2.0 * u * u_x * phi - u * u * ph_x) / phi2 + phi * ph_x +
                       ((u_y * v + u * v_y) * phi - u * v * ph_y) / phi2 - f * v + drag * u;
    const double r_v = v_t + ((u_x * v + u * v_x) * phi - u * v * ph_x) / phi2 +
                       (2.0 * v * v_y * phi - v * v * ph_y) / phi2 + phi * ph_y + f * u + drag * v;
    return State(r_phi, r_u, r_v);
  };
  return c;
}

inline TestCase make_case(const std::string &name, const ModelParams &model, double amplitude) {
  if (name == "lake_at_rest") {
    TestCase c = lake_at_rest(model.phi_bar);
    c.params = model;
    return c;
  }
  if (name == "standing_wave") {
    TestCase c = standing_wave(model.phi_bar, amplitude);
    c.params = model;
    return c;
  }
  if (name == "mms_nonlinear")
    return mms_nonlinear(model, amplitude);
  throw invalid_argument("unknown case '" + name + "'");
}

/// GLL-quadrature L2 norm of (field - exact) per variable.
inline std::array<double, 3> l2_error(const Discretization &disc, const StateField &q,
                                      const ExactSolution &exact, double t) {
  if (!exact)
    throw unsupported("l2_error: case has no exact solution");
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto &m = disc.ops(e).mass_diag;
    for (int k = 0; k < disc.nodes_per_element(); ++k) {
      const auto &pt = disc.coord(e, k);
      const State d = q.at(e, k) - exact(pt.x, pt.y, t);
      for (int v = 0; v < 3; ++v)
        acc[std::size_t(v)] += m[k] * d[v] * d[v];
    }
  }
  for (auto &a : acc)
    a = std::sqrt(a);
  return acc;
}

inline std::array<double, 3> l2_error(const Discretization &disc, const StateField &q,
                                      const TestCase &tc, double t) {
  if (!tc.has_exact())
    throw unsupported("l2_error: case '" + tc.name + "' has no exact solution");
  return l2_error(disc, q, tc.exact_solution, t);
}

} // namespace imexhdg
