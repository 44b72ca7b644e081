#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "imexhdg/errors.hpp"

namespace imexhdg {

/// Conservative state (phi', U, V): geopotential perturbation and momentum.
using State = Eigen::Vector3d;

enum Var : int { var_phi = 0, var_u = 1, var_v = 2 };

/// Flux tensor stored as its x- and y-columns.
struct Flux {
  State x = State::Zero();
  State y = State::Zero();

  State dot(double nx, double ny) const { return x * nx + y * ny; }
};

/// Prescribed source added to the right-hand side, as a function of (x, y, t).
/// Components follow the state ordering.
using ForcingFunction = std::function<State(double, double, double)>;

struct ModelParams {
  double phi_bar = 1.0;
  double f0 = 0.0;
  double beta = 0.0;
  double drag = 0.0;
  ForcingFunction forcing;

  double wave_speed() const { return std::sqrt(phi_bar); }

  void validate() const {
    if (!(phi_bar > 0.0) || !std::isfinite(phi_bar))
      throw invalid_argument("phi_bar must be positive and finite");
    if (!(drag >= 0.0))
      throw invalid_argument("drag must be non-negative");
  }
};

inline double total_geopotential(const State &q, const ModelParams &params) {
  return params.phi_bar + q[var_phi];
}

inline double checked_geopotential(const State &q, const ModelParams &params) {
  const double phi = total_geopotential(q, params);
  if (!(phi > 0.0))
    throw dry_state_error("non-positive total geopotential " + std::to_string(phi));
  return phi;
}

/// Full flux with the constant phi_bar^2/2 removed from the pressure so that
/// the flux vanishes at rest.
inline Flux flux_full(const State &q, const ModelParams &params) {
  const double phi = checked_geopotential(q, params);
  const double u = q[var_u], v = q[var_v];
  const double pressure = 0.5 * (phi * phi - params.phi_bar * params.phi_bar);
  Flux f;
  f.x = State(u, u * u / phi + pressure, u * v / phi);
  f.y = State(v, u * v / phi, v * v / phi + pressure);
  return f;
}

/// Linearization about rest: the gravity-wave operator.
inline Flux flux_linear(const State &q, const ModelParams &params) {
  const double p = params.phi_bar * q[var_phi];
  Flux f;
  f.x = State(q[var_u], p, 0.0);
  f.y = State(q[var_v], 0.0, p);
  return f;
}

/// Remainder F - F_L. Uses (phi^2 - phi_bar^2)/2 - phi_bar phi' = phi'^2 / 2.
inline Flux flux_nonlinear(const State &q, const ModelParams &params) {
  const double phi = checked_geopotential(q, params);
  const double u = q[var_u], v = q[var_v];
  const double remainder = 0.5 * q[var_phi] * q[var_phi];
  Flux f;
  f.x = State(0.0, u * u / phi + remainder, u * v / phi);
  f.y = State(0.0, u * v / phi, v * v / phi + remainder);
  return f;
}

/// Coriolis (f = f0 + beta y), linear drag and prescribed forcing.
inline State source(const State &q, double x, double y, double t, const ModelParams &params) {
  const double f = params.f0 + params.beta * y;
  State s(0.0, f * q[var_v] - params.drag * q[var_u], -f * q[var_u] - params.drag * q[var_v]);
  if (params.forcing)
    s += params.forcing(x, y, t);
  return s;
}

} // namespace imexhdg
