#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <set>

#include "imexhdg/dg_explicit.hpp"

using namespace imexhdg;

namespace {

ModelParams params_with(double phi_bar, double f0 = 0.0, double drag = 0.0) {
  ModelParams p;
  p.phi_bar = phi_bar;
  p.f0 = f0;
  p.drag = drag;
  return p;
}

StateField random_smooth_field(const Discretization &disc, std::mt19937 &gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const double a = d(gen), b = d(gen), c = d(gen), ph = d(gen);
  return interpolate(disc, [&](double x, double y) {
    return State(0.1 * std::sin(2 * M_PI * x + ph) * std::cos(2 * M_PI * y), 0.2 * a * std::cos(2 * M_PI * y),
                 0.2 * b * std::sin(2 * M_PI * (x + c)));
  });
}

// 1-D Lagrange basis on the GLL nodes, evaluated independently of the
// differentiation matrix.
double lagrange(const std::vector<double> &nodes, int j, double x) {
  double v = 1.0;
  for (std::size_t m = 0; m < nodes.size(); ++m)
    if (int(m) != j)
      v *= (x - nodes[m]) / (nodes[std::size_t(j)] - nodes[m]);
  return v;
}

double lagrange_deriv(const std::vector<double> &nodes, int j, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (int(k) == j)
      continue;
    double term = 1.0 / (nodes[std::size_t(j)] - nodes[k]);
    for (std::size_t m = 0; m < nodes.size(); ++m)
      if (int(m) != j && m != k)
        term *= (x - nodes[m]) / (nodes[std::size_t(j)] - nodes[m]);
    s += term;
  }
  return s;
}

} // namespace

TEST(Rusanov, Consistency) {
  const auto p = params_with(1.3);
  const State q(0.1, 0.4, -0.2);
  const double nx = 0.6, ny = 0.8;
  const State f = rusanov_flux(q, q, nx, ny, p);
  EXPECT_LE((f - flux_nonlinear(q, p).dot(nx, ny)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rusanov, RestStatesWithPressureJump) {
  const auto p = params_with(1.0);
  const State f = rusanov_flux(State(0.2, 0, 0), State(0.0, 0, 0), 1.0, 0.0, p);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_NEAR(f[1], 0.01, 1e-17);
  EXPECT_EQ(f[2], 0.0);
  const State g = rusanov_flux(State(0.2, 0, 0), State(0.0, 0, 0), 0.0, 1.0, p);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_NEAR(g[2], 0.01, 1e-17);
}

TEST(Rusanov, Antisymmetry) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const auto p = params_with(2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const State a(0.5 * d(gen), d(gen), d(gen)), b(0.5 * d(gen), d(gen), d(gen));
    const double th = M_PI * d(gen);
    const State f = rusanov_flux(a, b, std::cos(th), std::sin(th), p);
    const State g = rusanov_flux(b, a, -std::cos(th), -std::sin(th), p);
    EXPECT_LE((f + g).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Rusanov, DryStateRejected) {
  EXPECT_THROW(rusanov_flux(State(-1.5, 0, 0), State::Zero(), 1, 0, params_with(1.0)), dry_state_error);
}

TEST(ResidualExplicit, RestStateIsExactlyZero) {
  for (auto bc : {BoundaryKind::wall, BoundaryKind::periodic}) {
    Discretization disc(Mesh::build_structured(3, 2, {0, 1, 0, 1}, bc, bc), 2);
    const StateField r = residual_explicit(disc, StateField(disc), 0.0, params_with(1.0));
    EXPECT_EQ(r.values().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ResidualExplicit, FreeStreamPreservation) {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    Discretization disc(Mesh::build_structured(4, 3, {0, 2, -1, 1}, BoundaryKind::periodic, BoundaryKind::periodic), p);
    for (int trial = 0; trial < 10; ++trial) {
      const State c(0.3 * d(gen), d(gen), d(gen));
      const StateField q = interpolate(disc, [&](double, double) { return c; });
      const StateField r = residual_explicit(disc, q, 0.0, params_with(1.0));
      EXPECT_LE(r.values().cwiseAbs().maxCoeff(), 1e-12) << "p=" << p;
    }
  }
}

TEST(ResidualExplicit, MassConservation) {
  std::mt19937 gen(23);
  for (auto bc : {BoundaryKind::wall, BoundaryKind::periodic})
    for (int p = 1; p <= 3; ++p) {
      Discretization disc(Mesh::build_structured(4, 4, {0, 1, 0, 1}, bc, bc), p);
      const StateField q = random_smooth_field(disc, gen);
      const StateField r = residual_explicit(disc, q, 0.0, params_with(1.0, 0.7, 0.1));
      EXPECT_LE(std::abs(integrate(disc, r, var_phi)), 1e-12);
    }
}

TEST(ResidualExplicit, LocalSupport) {
  std::mt19937 gen(29);
  Discretization disc(Mesh::build_structured(5, 5, {0, 1, 0, 1}, BoundaryKind::wall, BoundaryKind::periodic), 2);
  const auto p = params_with(1.0);
  StateField q = random_smooth_field(disc, gen);
  const StateField r0 = residual_explicit(disc, q, 0.0, p);
  const int target = 12;
  for (int k = 0; k < disc.nodes_per_element(); ++k)
    q.at(target, k) += State(0.01, 0.02, -0.01);
  const StateField r1 = residual_explicit(disc, q, 0.0, p);

  std::set<int> allowed{target};
  for (int fid : disc.mesh().element(target).faces) {
    const auto &f = disc.mesh().face(fid);
    allowed.insert(f.left.element);
    if (f.right)
      allowed.insert(f.right->element);
  }
  for (int e = 0; e < disc.num_elements(); ++e) {
    double diff = 0.0;
    for (int k = 0; k < disc.nodes_per_element(); ++k)
      diff = std::max(diff, (r1.at(e, k) - r0.at(e, k)).cwiseAbs().maxCoeff());
    if (allowed.count(e)) {
      EXPECT_GT(diff, 0.0) << "element " << e;
    } else {
      EXPECT_EQ(diff, 0.0) << "element " << e;
    }
  }
}

TEST(ResidualExplicit, DryStateReportsElement) {
  Discretization disc(Mesh::build_structured(2, 2, {0, 1, 0, 1}, BoundaryKind::wall, BoundaryKind::wall), 1);
  StateField q(disc);
  q(3, 0, var_phi) = -2.0;
  try {
    residual_explicit(disc, q, 0.0, params_with(1.0));
    FAIL() << "expected dry_state_error";
  } catch (const dry_state_error &e) {
    EXPECT_GE(e.element(), 0);
  }
}

TEST(ResidualExplicit, Deterministic) {
  std::mt19937 gen(31);
  Discretization disc(Mesh::build_structured(6, 6, {0, 1, 0, 1}, BoundaryKind::periodic, BoundaryKind::periodic), 3);
  const StateField q = random_smooth_field(disc, gen);
  const auto p = params_with(1.0, 0.5);
  const StateField a = residual_explicit(disc, q, 0.1, p);
  const StateField b = residual_explicit(disc, q, 0.1, p);
  EXPECT_EQ(a.values(), b.values());
}

// Single wall-bounded element, p = 2, with polynomial states for which every
// integrand has degree <= 3 per direction. An over-integrated Gauss rule on
// the analytic state must reproduce the collocated weak residual.
TEST(ResidualExplicit, MatchesDenseQuadratureOracle) {
  const double x0 = 0.2, x1 = 0.9, y0 = -0.3, y1 = 0.5;
  Discretization disc(Mesh::build_structured(1, 1, {x0, x1, y0, y1}, BoundaryKind::wall, BoundaryKind::wall), 2);
  const auto &nodes = disc.basis().nodes();
  const ModelParams params = params_with(1.4, 0.8, 0.3);

  struct PolyState {
    double phi, a, b, c, d;
    State operator()(double x, double y) const { return State(phi, a + b * x, c + d * y); }
  };
  for (const PolyState ps : {PolyState{0.1, 0.3, -0.5, 0.2, 0.4}, PolyState{-0.2, -0.1, 0.7, 0.5, -0.6}}) {
    const StateField q = interpolate(disc, ps);
    const StateField r = residual_explicit_weak(disc, q, 0.0, params);

    // 4-point Gauss-Legendre
    const std::array<double, 4> gx{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    const std::array<double, 4> gw{0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
    const double hx = x1 - x0, hy = y1 - y0;
    auto xmap = [&](double xi) { return x0 + 0.5 * (xi + 1.0) * hx; };
    auto ymap = [&](double eta) { return y0 + 0.5 * (eta + 1.0) * hy; };

    for (int j = 0; j <= 2; ++j)
      for (int i = 0; i <= 2; ++i) {
        State expect = State::Zero();
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            const double xi = gx[std::size_t(a)], eta = gx[std::size_t(b)];
            const double wq = gw[std::size_t(a)] * gw[std::size_t(b)] * 0.25 * hx * hy;
            const State s = ps(xmap(xi), ymap(eta));
            const Flux fl = flux_nonlinear(s, params);
            const double vx = lagrange_deriv(nodes, i, xi) * (2.0 / hx) * lagrange(nodes, j, eta);
            const double vy = lagrange(nodes, i, xi) * lagrange_deriv(nodes, j, eta) * (2.0 / hy);
            const double v = lagrange(nodes, i, xi) * lagrange(nodes, j, eta);
            expect += wq * (vx * fl.x + vy * fl.y + v * source(s, xmap(xi), ymap(eta), 0.0, params));
          }
        // wall faces with mirrored ghost states
        for (int a = 0; a < 4; ++a) {
          const double t = gx[std::size_t(a)];
          struct SideQ { double xi, eta, nx, ny, len; };
          const std::array<SideQ, 4> sides{SideQ{t, -1.0, 0, -1, hx}, SideQ{1.0, t, 1, 0, hy},
                                           SideQ{t, 1.0, 0, 1, hx}, SideQ{-1.0, t, -1, 0, hy}};
          for (const auto &sq : sides) {
            const State s = ps(xmap(sq.xi), ymap(sq.eta));
            const double mn = s[1] * sq.nx + s[2] * sq.ny;
            const State ghost(s[0], s[1] - 2 * mn * sq.nx, s[2] - 2 * mn * sq.ny);
            const State fhat = rusanov_flux(s, ghost, sq.nx, sq.ny, params);
            const double v = lagrange(nodes, i, sq.xi) * lagrange(nodes, j, sq.eta);
            expect -= gw[std::size_t(a)] * 0.5 * sq.len * v * fhat;
          }
        }
        const State got = r.at(0, disc.basis().node(i, j));
        EXPECT_LE((got - expect).cwiseAbs().maxCoeff(), 1e-10) << "node (" << i << "," << j << ")";
      }
  }
}
