#pragma once

#include <cmath>
#include <deque>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "imexhdg/errors.hpp"
#include "imexhdg/fields.hpp"
#include "imexhdg/swe_model.hpp"

namespace imexhdg {

enum class SolverBackend { direct, gmres };

struct HdgOptions {
  double tau = 0.0; // <= 0 selects sqrt(phi_bar)
  SolverBackend backend = SolverBackend::direct;
  double rel_tol = 1e-10;
  int max_iter = 500;
  int restart = 30;
  std::size_t cache_size = 8;
};

/// HDG flux of the linear wave system for trace lambda ~ phi':
/// continuity U.n + tau (phi' - lambda), momentum phi_bar lambda n.
inline State hdg_numerical_flux(const State &q, double lambda, double nx, double ny, double tau,
                                const ModelParams &params) {
  const double un = q[var_u] * nx + q[var_v] * ny;
  return State(un + tau * (q[var_phi] - lambda), params.phi_bar * lambda * nx,
               params.phi_bar * lambda * ny);
}

/// Element blocks of the stage system
///   A x + B lambda = M r        (element equations)
///   C x + D lambda = 0          (transmission, this element's share)
/// Element unknowns are ordered [phi' nodes, U nodes, V nodes]; trace columns
/// are [side][face node].
struct LocalBlocks {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::VectorXd D; // diagonal
  Eigen::PartialPivLU<Eigen::MatrixXd> A_lu;
  Eigen::MatrixXd C_Ainv; // C A^-1
  Eigen::MatrixXd schur;  // D - C A^-1 B
};

/// Blocks for every element. Elements with identical extents share one entry.
struct LocalAssembly {
  double alpha_dt = 0.0;
  double tau = 0.0;
  std::vector<LocalBlocks> blocks;
  std::vector<int> block_of_element;

  const LocalBlocks &of(int e) const { return blocks[std::size_t(block_of_element[std::size_t(e)])]; }
};

namespace detail {

inline LocalBlocks assemble_element(const NodalBasis &basis, const ElementOperators &ops,
                                    const ModelParams &params, double alpha_dt, double tau) {
  const int n1 = basis.num_nodes_1d();
  const int n = basis.num_nodes();
  const int nt = 4 * n1;
  const double pb = params.phi_bar;
  LocalBlocks lb;
  lb.A = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  lb.B = Eigen::MatrixXd::Zero(3 * n, nt);
  lb.C = Eigen::MatrixXd::Zero(nt, 3 * n);
  lb.D = Eigen::VectorXd::Zero(nt);

  for (int k = 0; k < n; ++k) {
    lb.A(k, k) = ops.mass_diag[k];
    lb.A(n + k, n + k) = ops.mass_diag[k];
    lb.A(2 * n + k, 2 * n + k) = ops.mass_diag[k];
  }
  lb.A.block(0, n, n, n) -= alpha_dt * ops.weak_dx;
  lb.A.block(0, 2 * n, n, n) -= alpha_dt * ops.weak_dy;
  lb.A.block(n, 0, n, n) -= alpha_dt * pb * ops.weak_dx;
  lb.A.block(2 * n, 0, n, n) -= alpha_dt * pb * ops.weak_dy;

  for (int s = 0; s < 4; ++s) {
    const Point nrm = outward_normal(s);
    for (int f = 0; f < n1; ++f) {
      const int k = basis.side_node(s, f);
      const int c = s * n1 + f;
      const double wf = ops.face_weights[std::size_t(s)][f];
      // face terms of the continuity equation: U.n + tau (phi - lambda)
      lb.A(k, k) += alpha_dt * tau * wf;
      lb.A(k, n + k) += alpha_dt * nrm.x * wf;
      lb.A(k, 2 * n + k) += alpha_dt * nrm.y * wf;
      lb.B(k, c) = -alpha_dt * tau * wf;
      // momentum: phi_bar lambda n
      lb.B(n + k, c) = alpha_dt * pb * nrm.x * wf;
      lb.B(2 * n + k, c) = alpha_dt * pb * nrm.y * wf;
      // transmission
      lb.C(c, k) = tau * wf;
      lb.C(c, n + k) = nrm.x * wf;
      lb.C(c, 2 * n + k) = nrm.y * wf;
      lb.D[c] = -tau * wf;
    }
  }

  lb.A_lu.compute(lb.A);
  const double rcond = lb.A_lu.rcond();
  if (!(rcond > 1e-14))
    throw assembly_error("singular local matrix (rcond " + std::to_string(rcond) +
                         "); check tau > 0 and alpha_dt > 0");
  const Eigen::MatrixXd ainv = lb.A_lu.inverse();
  lb.C_Ainv = lb.C * ainv;
  lb.schur = -lb.C_Ainv * lb.B;
  lb.schur.diagonal() += lb.D;
  return lb;
}

} // namespace detail

/// Element-local blocks for shift alpha_dt and stabilization tau.
inline LocalAssembly assemble_local(const Discretization &disc, const ModelParams &params,
                                    double alpha_dt, double tau) {
  if (!(alpha_dt > 0.0))
    throw assembly_error("alpha_dt must be positive");
  if (!(tau > 0.0))
    throw assembly_error("tau must be positive");
  LocalAssembly la;
  la.alpha_dt = alpha_dt;
  la.tau = tau;
  std::vector<std::pair<double, double>> extents;
  la.block_of_element.resize(std::size_t(disc.num_elements()));
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto &ops = disc.ops(e);
    int id = -1;
    for (std::size_t b = 0; b < extents.size(); ++b)
      if (extents[b].first == ops.hx && extents[b].second == ops.hy)
        id = int(b);
    if (id < 0) {
      id = int(extents.size());
      extents.emplace_back(ops.hx, ops.hy);
      la.blocks.push_back(detail::assemble_element(disc.basis(), ops, params, alpha_dt, tau));
    }
    la.block_of_element[std::size_t(e)] = id;
  }
  return la;
}

/// Block-Jacobi preconditioner with one dense block per face.
class FaceBlockJacobi {
public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  FaceBlockJacobi() = default;
  template <class Mat> explicit FaceBlockJacobi(const Mat &m) { compute(m); }

  void set_block_size(int b) { block_ = b; }

  template <class Mat> FaceBlockJacobi &analyzePattern(const Mat &) { return *this; }
  template <class Mat> FaceBlockJacobi &factorize(const Mat &m) { return compute(m); }
  template <class Mat> FaceBlockJacobi &compute(const Mat &m) {
    const Eigen::Index n = m.rows();
    const Eigen::Index nb = n / block_;
    inv_.assign(std::size_t(nb), Eigen::MatrixXd());
    Eigen::SparseMatrix<double> sm = m;
    for (Eigen::Index b = 0; b < nb; ++b)
      inv_[std::size_t(b)] = Eigen::MatrixXd(sm.block(b * block_, b * block_, block_, block_)).inverse();
    return *this;
  }

  template <class Rhs> Eigen::VectorXd solve(const Rhs &rhs) const {
    Eigen::VectorXd x(rhs.size());
    for (std::size_t b = 0; b < inv_.size(); ++b)
      x.segment(Eigen::Index(b) * block_, block_) =
          inv_[b] * rhs.segment(Eigen::Index(b) * block_, block_);
    return x;
  }

  Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
  int block_ = 1;
  std::vector<Eigen::MatrixXd> inv_;
};

/// Statically condensed trace system H lambda = g with
/// H = sum_K (D_K - C_K A_K^-1 B_K) over the skeleton.
struct CondensedSystem {
  const Discretization *disc = nullptr;
  ModelParams params;
  LocalAssembly local;
  HdgOptions options;
  Eigen::SparseMatrix<double> H;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu;
  std::unique_ptr<Eigen::GMRES<Eigen::SparseMatrix<double>, FaceBlockJacobi>> gmres;

  double alpha_dt() const { return local.alpha_dt; }
  double tau() const { return local.tau; }
  Eigen::Index num_trace_unknowns() const { return H.rows(); }

  /// Global trace index of element e's side s, face node f.
  Eigen::Index trace_index(int e, int s, int f) const {
    const int n1 = disc->basis().num_nodes_1d();
    return Eigen::Index(disc->mesh().element(e).faces[std::size_t(s)]) * n1 + f;
  }
};

inline std::unique_ptr<CondensedSystem> condense_and_factor(const Discretization &disc,
                                                            const ModelParams &params,
                                                            LocalAssembly local,
                                                            const HdgOptions &options) {
  auto sys = std::make_unique<CondensedSystem>();
  sys->disc = &disc;
  sys->params = params;
  sys->local = std::move(local);
  sys->options = options;

  const int n1 = disc.basis().num_nodes_1d();
  const int nt = 4 * n1;
  const Eigen::Index ndof = Eigen::Index(disc.mesh().num_faces()) * n1;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(std::size_t(disc.num_elements()) * std::size_t(nt * nt));
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto &S = sys->local.of(e).schur;
    for (int a = 0; a < nt; ++a)
      for (int b = 0; b < nt; ++b)
        trips.emplace_back(int(sys->trace_index(e, a / n1, a % n1)),
                           int(sys->trace_index(e, b / n1, b % n1)), S(a, b));
  }
  sys->H.resize(ndof, ndof);
  sys->H.setFromTriplets(trips.begin(), trips.end());
  sys->H.makeCompressed();

  if (options.backend == SolverBackend::direct) {
    sys->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
    sys->lu->analyzePattern(sys->H);
    sys->lu->factorize(sys->H);
    if (sys->lu->info() != Eigen::Success)
      throw condensation_error("sparse factorization of the trace system failed: " +
                               sys->lu->lastErrorMessage());
  } else {
    sys->gmres = std::make_unique<Eigen::GMRES<Eigen::SparseMatrix<double>, FaceBlockJacobi>>();
    sys->gmres->preconditioner().set_block_size(n1);
    sys->gmres->set_restart(options.restart);
    sys->gmres->setTolerance(options.rel_tol);
    sys->gmres->setMaxIterations(options.max_iter);
    sys->gmres->compute(sys->H);
  }
  return sys;
}

struct ImplicitSolution {
  StateField q;
  TraceField lambda;
};

namespace detail {

inline Eigen::VectorXd gather_element(const StateField &field, int e, int n) {
  Eigen::VectorXd x(3 * n);
  for (int k = 0; k < n; ++k)
    for (int v = 0; v < 3; ++v)
      x[v * n + k] = field(e, k, v);
  return x;
}

} // namespace detail

/// Solves (M + alpha_dt K) q = M r, K the HDG divergence of the linear flux.
inline ImplicitSolution implicit_solve(const CondensedSystem &sys, const StateField &rhs) {
  const auto &disc = *sys.disc;
  const int n = disc.nodes_per_element();
  const int n1 = disc.basis().num_nodes_1d();
  const int nt = 4 * n1;

  Eigen::VectorXd g = Eigen::VectorXd::Zero(sys.num_trace_unknowns());
  std::vector<Eigen::VectorXd> mr(std::size_t(disc.num_elements()));
  for (int e = 0; e < disc.num_elements(); ++e) {
    Eigen::VectorXd x = detail::gather_element(rhs, e, n);
    const auto &m = disc.ops(e).mass_diag;
    for (int v = 0; v < 3; ++v)
      x.segment(v * n, n).array() *= m.array();
    const Eigen::VectorXd cx = sys.local.of(e).C_Ainv * x;
    for (int a = 0; a < nt; ++a)
      g[sys.trace_index(e, a / n1, a % n1)] -= cx[a];
    mr[std::size_t(e)] = std::move(x);
  }

  ImplicitSolution sol{StateField(disc), TraceField(disc.mesh().num_faces(), n1)};
  if (sys.lu) {
    sol.lambda.values() = sys.lu->solve(g);
  } else {
    sol.lambda.values() = sys.gmres->solve(g);
    if (sys.gmres->info() != Eigen::Success)
      throw solver_error("GMRES did not converge in " + std::to_string(sys.gmres->iterations()) +
                             " iterations (relative residual " + std::to_string(sys.gmres->error()) + ")",
                         sys.gmres->error());
  }

  Eigen::VectorXd lam_local(nt);
  for (int e = 0; e < disc.num_elements(); ++e) {
    for (int a = 0; a < nt; ++a)
      lam_local[a] = sol.lambda.values()[sys.trace_index(e, a / n1, a % n1)];
    const auto &lb = sys.local.of(e);
    const Eigen::VectorXd x = lb.A_lu.solve(mr[std::size_t(e)] - lb.B * lam_local);
    for (int k = 0; k < n; ++k)
      for (int v = 0; v < 3; ++v)
        sol.q(e, k, v) = x[v * n + k];
  }
  return sol;
}

/// Owns the discrete linear operator: caches condensed systems by shift and
/// applies L_h = -M^-1 K directly when needed.
class HdgImplicitOperator {
public:
  HdgImplicitOperator(const Discretization &disc, ModelParams params, HdgOptions options = {})
      : disc_(&disc), params_(std::move(params)), options_(options) {
    params_.validate();
    if (!(options_.tau > 0.0))
      options_.tau = params_.wave_speed();
  }

  double tau() const { return options_.tau; }
  const HdgOptions &options() const { return options_; }
  const Discretization &discretization() const { return *disc_; }

  /// Number of times local blocks were assembled and condensed.
  int assembly_count() const { return assembly_count_; }

  const CondensedSystem &system(double alpha_dt) {
    for (const auto &entry : cache_)
      if (std::abs(entry->alpha_dt() - alpha_dt) <= 1e-14 * std::max(std::abs(alpha_dt), 1e-300))
        return *entry;
    auto local = assemble_local(*disc_, params_, alpha_dt, options_.tau);
    cache_.push_back(condense_and_factor(*disc_, params_, std::move(local), options_));
    ++assembly_count_;
    if (cache_.size() > options_.cache_size)
      cache_.pop_front();
    return *cache_.back();
  }

  ImplicitSolution solve(double alpha_dt, const StateField &rhs) {
    return implicit_solve(system(alpha_dt), rhs);
  }

  /// Trace implied by the transmission condition for a given field; on each
  /// face node lambda = sum(U.n + tau phi') / (tau * number of sides).
  TraceField trace_of(const StateField &q) const {
    const auto &mesh = disc_->mesh();
    const auto &basis = disc_->basis();
    const int n1 = basis.num_nodes_1d();
    const double tau = options_.tau;
    TraceField lam(mesh.num_faces(), n1);
    for (int fid = 0; fid < mesh.num_faces(); ++fid) {
      const auto &face = mesh.face(fid);
      for (int f = 0; f < n1; ++f) {
        const State ql = q.at(face.left.element, basis.side_node(face.left.side, f));
        double sum = ql[var_u] * face.normal.x + ql[var_v] * face.normal.y + tau * ql[var_phi];
        double count = 1.0;
        if (face.right) {
          const State qr = q.at(face.right->element, basis.side_node(face.right->side, f));
          sum += -(qr[var_u] * face.normal.x + qr[var_v] * face.normal.y) + tau * qr[var_phi];
          count = 2.0;
        }
        lam(fid, f) = sum / (tau * count);
      }
    }
    return lam;
  }

  /// K q in weak form (before the mass solve) for a given trace.
  StateField weak_divergence(const StateField &q, const TraceField &lam) const {
    const auto &mesh = disc_->mesh();
    const auto &basis = disc_->basis();
    const int n = basis.num_nodes();
    const int n1 = basis.num_nodes_1d();
    const double tau = options_.tau;
    StateField r(*disc_);
    for (int e = 0; e < disc_->num_elements(); ++e) {
      const auto &ops = disc_->ops(e);
      const Eigen::VectorXd x = detail::gather_element(q, e, n);
      const Eigen::VectorXd phi = x.segment(0, n), mu = x.segment(n, n), mv = x.segment(2 * n, n);
      const Eigen::VectorXd rphi = -(ops.weak_dx * mu + ops.weak_dy * mv);
      const Eigen::VectorXd ru = -params_.phi_bar * (ops.weak_dx * phi);
      const Eigen::VectorXd rv = -params_.phi_bar * (ops.weak_dy * phi);
      for (int k = 0; k < n; ++k)
        r.at(e, k) = State(rphi[k], ru[k], rv[k]);
      const auto &elem = mesh.element(e);
      for (int s = 0; s < 4; ++s) {
        const Point nrm = outward_normal(s);
        for (int f = 0; f < n1; ++f) {
          const int k = basis.side_node(s, f);
          const State fl = hdg_numerical_flux(State(q.at(e, k)), lam(elem.faces[std::size_t(s)], f),
                                              nrm.x, nrm.y, tau, params_);
          r.at(e, k) += ops.face_weights[std::size_t(s)][f] * fl;
        }
      }
    }
    return r;
  }

  /// L_h q = -M^-1 K q with the trace eliminated by the transmission condition.
  StateField apply(const StateField &q) const {
    StateField r = weak_divergence(q, trace_of(q));
    for (int e = 0; e < disc_->num_elements(); ++e) {
      const auto &m = disc_->ops(e).mass_diag;
      for (int k = 0; k < disc_->nodes_per_element(); ++k)
        r.at(e, k) /= -m[k];
    }
    return r;
  }

private:
  const Discretization *disc_;
  ModelParams params_;
  HdgOptions options_;
  std::deque<std::unique_ptr<CondensedSystem>> cache_;
  int assembly_count_ = 0;
};

} // namespace imexhdg
