#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "imexhdg/cases.hpp"
#include "imexhdg/hdg_implicit.hpp"
#include "oracles/monolithic_hdg.hpp"

using namespace imexhdg;

namespace {

ModelParams phi_bar_params(double pb) {
  ModelParams p;
  p.phi_bar = pb;
  return p;
}

StateField random_field(const Discretization &disc, std::mt19937 &gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  StateField r(disc);
  for (Eigen::Index i = 0; i < r.size(); ++i)
    r.values()[i] = d(gen);
  return r;
}

Discretization make_disc(int n, int p, BoundaryKind bc = BoundaryKind::wall) {
  return Discretization(Mesh::build_structured(n, n, {0, 1, 0, 1}, bc, bc), p);
}

double rel_diff(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

} // namespace

TEST(HdgFlux, Examples) {
  const auto p = phi_bar_params(1.0);
  const State f = hdg_numerical_flux(State(0.3, 0.05, 0.0), 0.1, 1.0, 0.0, 1.0, p);
  EXPECT_NEAR(f[0], 0.25, 1e-15);
  EXPECT_NEAR(f[1], 0.1, 1e-15);
  EXPECT_EQ(f[2], 0.0);
  // trace equal to the interior value leaves only the normal momentum
  const State g = hdg_numerical_flux(State(0.3, 0.2, -0.4), 0.3, 0.0, 1.0, 2.0, p);
  EXPECT_NEAR(g[0], -0.4, 1e-15);
}

TEST(LocalBlocks, SmallShiftApproachesMass) {
  const NodalBasis b(2);
  const auto disc = make_disc(1, 2);
  const auto lb = detail::assemble_element(b, disc.ops(0), phi_bar_params(1.0), 1e-12, 1.0);
  const int n = b.num_nodes();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int v = 0; v < 3; ++v)
    m.block(v * n, v * n, n, n) = disc.ops(0).mass_diag.asDiagonal();
  EXPECT_LE((lb.A - m).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LocalBlocks, CouplingSparsityIsTransposed) {
  const auto disc = make_disc(1, 3);
  const auto lb = detail::assemble_element(disc.basis(), disc.ops(0), phi_bar_params(2.0), 0.3, 1.5);
  ASSERT_EQ(lb.B.rows(), lb.C.cols());
  ASSERT_EQ(lb.B.cols(), lb.C.rows());
  // B couples momentum to the trace while C reads it; compare row patterns of the continuity part
  for (int c = 0; c < lb.B.cols(); ++c)
    for (int r = 0; r < disc.nodes_per_element(); ++r)
      EXPECT_EQ(lb.B(r, c) != 0.0, lb.C(c, r) != 0.0);
  for (int c = 0; c < lb.B.cols(); ++c)
    for (int r = 0; r < lb.B.rows(); ++r)
      if (lb.B(r, c) != 0.0) {
        EXPECT_NE(lb.C(c, r), 0.0);
      }
}

TEST(LocalBlocks, RejectsInvalidParameters) {
  const auto disc = make_disc(2, 1);
  const auto p = phi_bar_params(1.0);
  EXPECT_THROW(assemble_local(disc, p, 0.0, 1.0), assembly_error);
  EXPECT_THROW(assemble_local(disc, p, -0.1, 1.0), assembly_error);
  EXPECT_THROW(assemble_local(disc, p, 0.1, 0.0), assembly_error);
  HdgImplicitOperator op(disc, p);
  EXPECT_THROW(op.system(0.0), assembly_error);
}

TEST(LocalBlocks, IdenticalElementsShareBlocks) {
  const auto disc = make_disc(4, 2);
  const auto la = assemble_local(disc, phi_bar_params(1.0), 0.1, 1.0);
  EXPECT_EQ(la.blocks.size(), 1u);
}

TEST(Condensed, MatchesDenseSchurComplement) {
  const auto p = phi_bar_params(1.3);
  for (int order : {1, 2})
    for (int n : {1, 2}) {
      const auto disc = make_disc(n, order, n == 1 ? BoundaryKind::wall : BoundaryKind::periodic);
      const double tau = std::sqrt(1.3);
      auto sys = condense_and_factor(disc, p, assemble_local(disc, p, 0.07, tau), HdgOptions{});
      const Eigen::MatrixXd h(sys->H);
      const Eigen::MatrixXd ref = oracle::dense_schur(disc, 1.3, tau, 0.07);
      ASSERT_EQ(h.rows(), ref.rows());
      EXPECT_LE((h - ref).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n << " p=" << order;
    }
}

TEST(Condensed, SizeAndSymmetricPattern) {
  const auto p = phi_bar_params(1.0);
  for (auto bc : {BoundaryKind::wall, BoundaryKind::periodic}) {
    const auto disc = make_disc(3, 2, bc);
    auto sys = condense_and_factor(disc, p, assemble_local(disc, p, 0.1, 1.0), HdgOptions{});
    EXPECT_EQ(sys->H.rows(), disc.mesh().num_faces() * 3);
    const Eigen::MatrixXd h(sys->H);
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        EXPECT_EQ(h(i, j) != 0.0, h(j, i) != 0.0);
  }
}

TEST(ImplicitSolve, ZeroRightHandSide) {
  const auto disc = make_disc(3, 2);
  HdgImplicitOperator op(disc, phi_bar_params(1.0));
  const auto sol = op.solve(0.2, StateField(disc));
  EXPECT_EQ(sol.q.values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ImplicitSolve, ConstantStateOnPeriodicMesh) {
  const auto disc = make_disc(3, 2, BoundaryKind::periodic);
  HdgImplicitOperator op(disc, phi_bar_params(2.0));
  const StateField r = interpolate(disc, [](double, double) { return State(0.3, -0.2, 0.5); });
  const auto sol = op.solve(0.5, r);
  EXPECT_LE((sol.q.values() - r.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ImplicitSolve, MatchesMonolithicOracle) {
  std::mt19937 gen(101);
  for (auto bc : {BoundaryKind::wall, BoundaryKind::periodic})
    for (int n : {1, 2, 4})
      for (int p : {1, 2}) {
        const double pb = 1.7, alpha_dt = 0.13;
        const auto disc = make_disc(n, p, bc);
        HdgImplicitOperator op(disc, phi_bar_params(pb));
        for (int trial = 0; trial < 3; ++trial) {
          const StateField r = random_field(disc, gen);
          const auto sol = op.solve(alpha_dt, r);
          const auto ref = oracle::solve_monolithic(disc, pb, op.tau(), alpha_dt, r);
          EXPECT_LE(rel_diff(sol.q.values(), ref.q.values()), 1e-9) << "n=" << n << " p=" << p;
          EXPECT_LE(rel_diff(sol.lambda.values(), ref.lambda), 1e-9) << "n=" << n << " p=" << p;
        }
      }
}

TEST(ImplicitSolve, StandingWaveModeMatchesOracle) {
  const auto tc = standing_wave(1.0, 1e-3);
  const auto disc = make_disc(16, 2);
  const StateField r = interpolate(disc, [&](double x, double y) { return tc.exact_solution(x, y, 0.1); });
  HdgImplicitOperator op(disc, tc.params);
  const auto sol = op.solve(0.01, r);
  const auto ref = oracle::solve_monolithic(disc, 1.0, op.tau(), 0.01, r);
  EXPECT_LE((sol.q.values() - ref.q.values()).cwiseAbs().maxCoeff(), 1e-9 * 1e-3);
}

TEST(ImplicitSolve, LocalAndTransmissionResiduals) {
  std::mt19937 gen(7);
  for (auto bc : {BoundaryKind::wall, BoundaryKind::periodic}) {
    const auto disc = make_disc(4, 3, bc);
    const double alpha_dt = 0.05;
    HdgImplicitOperator op(disc, phi_bar_params(1.0));
    const StateField r = random_field(disc, gen);
    const auto sol = op.solve(alpha_dt, r);

    // M (q - r) + alpha_dt K(q, lambda) = 0
    StateField res = op.weak_divergence(sol.q, sol.lambda) * alpha_dt;
    for (int e = 0; e < disc.num_elements(); ++e)
      for (int k = 0; k < disc.nodes_per_element(); ++k)
        res.at(e, k) += disc.ops(e).mass_diag[k] * (sol.q.at(e, k) - r.at(e, k));
    EXPECT_LE(res.values().cwiseAbs().maxCoeff(), 1e-10);

    // sum over the sides of a face of the normal mass flux vanishes
    const auto &mesh = disc.mesh();
    const auto &b = disc.basis();
    for (int fid = 0; fid < mesh.num_faces(); ++fid) {
      const auto &face = mesh.face(fid);
      for (int f = 0; f < b.num_nodes_1d(); ++f) {
        double s = 0.0;
        for (auto es : {std::optional<ElementSide>(face.left), face.right}) {
          if (!es)
            continue;
          const Point nrm = mesh.element_normal(es->element, es->side);
          s += hdg_numerical_flux(State(sol.q.at(es->element, b.side_node(es->side, f))), sol.lambda(fid, f),
                                  nrm.x, nrm.y, op.tau(), phi_bar_params(1.0))[var_phi];
        }
        EXPECT_LE(std::abs(s), 1e-10);
      }
    }
  }
}

TEST(ImplicitSolve, ConservesMass) {
  std::mt19937 gen(13);
  for (auto bc : {BoundaryKind::wall, BoundaryKind::periodic}) {
    const auto disc = make_disc(5, 2, bc);
    HdgImplicitOperator op(disc, phi_bar_params(3.0));
    const StateField r = random_field(disc, gen);
    const auto sol = op.solve(0.3, r);
    EXPECT_LE(std::abs(integrate(disc, sol.q, var_phi) - integrate(disc, r, var_phi)), 1e-11);
  }
}

TEST(HdgOperator, ApplyIsConsistentWithSolve) {
  std::mt19937 gen(19);
  const auto disc = make_disc(3, 2, BoundaryKind::periodic);
  HdgImplicitOperator op(disc, phi_bar_params(1.0));
  const StateField r = random_field(disc, gen);
  const double alpha_dt = 0.04;
  const auto sol = op.solve(alpha_dt, r);
  const StateField lhs = op.apply(sol.q);
  const StateField rhs = (sol.q - r) / alpha_dt;
  EXPECT_LE(rel_diff(lhs.values(), rhs.values()), 1e-9);
}

TEST(HdgOperator, ReusesFactorizations) {
  const auto disc = make_disc(3, 1);
  HdgImplicitOperator op(disc, phi_bar_params(1.0));
  for (int i = 0; i < 10; ++i)
    op.solve(0.1, StateField(disc));
  EXPECT_EQ(op.assembly_count(), 1);
  op.solve(0.2, StateField(disc));
  op.solve(0.1, StateField(disc));
  EXPECT_EQ(op.assembly_count(), 2);
}

TEST(HdgOperator, GmresMatchesDirect) {
  std::mt19937 gen(23);
  const auto disc = make_disc(6, 2);
  HdgOptions it;
  it.backend = SolverBackend::gmres;
  it.rel_tol = 1e-13;
  HdgImplicitOperator direct(disc, phi_bar_params(1.0)), gmres(disc, phi_bar_params(1.0), it);
  const StateField r = random_field(disc, gen);
  const auto a = direct.solve(0.1, r), b = gmres.solve(0.1, r);
  EXPECT_LE(rel_diff(b.q.values(), a.q.values()), 1e-9);
}

TEST(HdgOperator, GmresReportsNonConvergence) {
  std::mt19937 gen(29);
  const auto disc = make_disc(6, 2);
  HdgOptions it;
  it.backend = SolverBackend::gmres;
  it.rel_tol = 1e-15;
  it.max_iter = 1;
  HdgImplicitOperator op(disc, phi_bar_params(1.0), it);
  EXPECT_THROW(op.solve(0.1, random_field(disc, gen)), solver_error);
}

// L_h applied to the interpolated eigenmode approximates its time derivative.
TEST(HdgOperator, SpatialConsistencyConverges) {
  const auto tc = standing_wave(1.0, 1e-3);
  const double w = M_PI * std::sqrt(2.0), t = 0.3;
  const double m = 1e-3 * M_PI / w;
  auto dqdt = [&](double x, double y) {
    const double cx = std::cos(M_PI * x), sx = std::sin(M_PI * x);
    const double cy = std::cos(M_PI * y), sy = std::sin(M_PI * y);
    return State(-1e-3 * w * cx * cy * std::sin(w * t), m * w * sx * cy * std::cos(w * t),
                 m * w * cx * sy * std::cos(w * t));
  };
  for (int p : {1, 2, 3}) {
    double prev = 0.0;
    for (int n : {4, 8, 16}) {
      const auto disc = make_disc(n, p);
      HdgImplicitOperator op(disc, tc.params);
      const StateField q = interpolate(disc, [&](double x, double y) { return tc.exact_solution(x, y, t); });
      const StateField lq = op.apply(q);
      const StateField ex = interpolate(disc, dqdt);
      StateField diff = lq - ex;
      double err = 0.0;
      for (int v = 0; v < 3; ++v)
        err += std::pow(l2_error(disc, diff, [](double, double, double) { return State::Zero().eval(); }, 0.0)[std::size_t(v)], 2);
      err = std::sqrt(err);
      if (prev > 0.0) {
        EXPECT_GE(std::log2(prev / err), p - 0.5) << "p=" << p << " n=" << n;
      }
      prev = err;
    }
  }
}
