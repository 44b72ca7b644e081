#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "imexhdg/fields.hpp"
#include "imexhdg/swe_model.hpp"

namespace imexhdg {

/// Rusanov flux of the nonlinear remainder in direction n. The dissipation
/// speed is the advective one, max |u.n| over both sides; the gravity-wave
/// speed belongs to the implicit operator.
inline State rusanov_flux(const State &left, const State &right, double nx, double ny,
                          const ModelParams &params) {
  const double phi_l = checked_geopotential(left, params);
  const double phi_r = checked_geopotential(right, params);
  const double un_l = (left[var_u] * nx + left[var_v] * ny) / phi_l;
  const double un_r = (right[var_u] * nx + right[var_v] * ny) / phi_r;
  const double smax = std::max(std::abs(un_l), std::abs(un_r));
  return 0.5 * (flux_nonlinear(left, params).dot(nx, ny) + flux_nonlinear(right, params).dot(nx, ny)) -
         0.5 * smax * (right - left);
}

/// Mirror state across a wall: normal momentum negated, the rest copied.
inline State wall_ghost(const State &q, double nx, double ny) {
  const double mn = q[var_u] * nx + q[var_v] * ny;
  return State(q[var_phi], q[var_u] - 2.0 * mn * nx, q[var_v] - 2.0 * mn * ny);
}

/// Explicit DG residual of the nonlinear remainder, in weak form (before the
/// mass solve):
///   r = int grad(v).F_N - sum_faces int v F^*.n + int v S
/// Face fluxes are computed first for every face in face order, then lifted
/// element by element, so the result does not depend on evaluation order.
inline StateField residual_explicit_weak(const Discretization &disc, const StateField &q, double t,
                                         const ModelParams &params) {
  const auto &mesh = disc.mesh();
  const auto &basis = disc.basis();
  const int n1 = basis.num_nodes_1d();
  const int npe = basis.num_nodes();
  const auto &d = basis.diff_matrix();
  const auto &w = basis.weights();

  std::vector<State> face_flux(std::size_t(mesh.num_faces()) * std::size_t(n1));
  for (int fid = 0; fid < mesh.num_faces(); ++fid) {
    const auto &face = mesh.face(fid);
    const double nx = face.normal.x, ny = face.normal.y;
    for (int f = 0; f < n1; ++f) {
      const State ql = q.at(face.left.element, basis.side_node(face.left.side, f));
      const State qr = face.right ? State(q.at(face.right->element, basis.side_node(face.right->side, f)))
                                  : wall_ghost(ql, nx, ny);
      try {
        face_flux[std::size_t(fid * n1 + f)] = rusanov_flux(ql, qr, nx, ny, params);
      } catch (const dry_state_error &err) {
        throw dry_state_error(err.what(), face.left.element);
      }
    }
  }

  StateField r(disc);
  std::vector<State> fx(static_cast<std::size_t>(npe)), fy(static_cast<std::size_t>(npe));
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto &ops = disc.ops(e);
    try {
      for (int k = 0; k < npe; ++k) {
        const Flux fl = flux_nonlinear(q.at(e, k), params);
        fx[std::size_t(k)] = fl.x;
        fy[std::size_t(k)] = fl.y;
      }
    } catch (const dry_state_error &err) {
      throw dry_state_error(err.what(), e);
    }
    // volume: int dv/dx F_x + dv/dy F_y under GLL collocation
    const double sx = ops.jacobian * 2.0 / ops.hx;
    const double sy = ops.jacobian * 2.0 / ops.hy;
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n1; ++i) {
        State acc = State::Zero();
        for (int m = 0; m < n1; ++m) {
          acc += (w[std::size_t(m)] * w[std::size_t(j)] * sx * d(m, i)) * fx[std::size_t(basis.node(m, j))];
          acc += (w[std::size_t(i)] * w[std::size_t(m)] * sy * d(m, j)) * fy[std::size_t(basis.node(i, m))];
        }
        r.at(e, basis.node(i, j)) += acc;
      }
    // faces
    const auto &elem = mesh.element(e);
    for (int s = 0; s < 4; ++s) {
      const int fid = elem.faces[std::size_t(s)];
      const auto &face = mesh.face(fid);
      const double sign = (face.left.element == e && face.left.side == s) ? 1.0 : -1.0;
      for (int f = 0; f < n1; ++f)
        r.at(e, basis.side_node(s, f)) -=
            (sign * ops.face_weights[std::size_t(s)][f]) * face_flux[std::size_t(fid * n1 + f)];
    }
    // sources by collocation
    for (int k = 0; k < npe; ++k) {
      const auto &pt = disc.coord(e, k);
      r.at(e, k) += ops.mass_diag[k] * source(q.at(e, k), pt.x, pt.y, t, params);
    }
  }
  return r;
}

/// Applies the inverse of the diagonal mass matrix in place.
inline void apply_inverse_mass(const Discretization &disc, StateField &r) {
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto &m = disc.ops(e).mass_diag;
    for (int k = 0; k < disc.nodes_per_element(); ++k)
      r.at(e, k) /= m[k];
  }
}

/// Tendency N_h(q, t) = M^-1 r of the explicit operator.
inline StateField residual_explicit(const Discretization &disc, const StateField &q, double t,
                                    const ModelParams &params) {
  StateField r = residual_explicit_weak(disc, q, t, params);
  apply_inverse_mass(disc, r);
  return r;
}

} // namespace imexhdg
