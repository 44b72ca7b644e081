#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "imexhdg/cases.hpp"
#include "imexhdg/config.hpp"
#include "imexhdg/imex.hpp"
#include "imexhdg/shallow_water.hpp"
#include "imexhdg/vtk.hpp"

namespace imexhdg {

/// Time-marching state for one validated configuration.
class Simulation {
public:
  explicit Simulation(const Config &cfg)
      : cfg_(cfg), case_(cfg.make_test_case()), tableau_(tableau(cfg.time.scheme)) {
    Mesh mesh = Mesh::build_structured(cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.bounds, cfg.mesh.bc_x, cfg.mesh.bc_y);
    disc_ = std::make_unique<Discretization>(std::move(mesh), cfg.disc.order);
    ModelParams params = cfg.model();
    if (cfg.case_.forcing && case_.mms_source)
      params.forcing = case_.mms_source;
    op_ = std::make_unique<ShallowWaterOperator>(*disc_, params, cfg.hdg_options(), cfg.time.splitting,
                                                 cfg.case_.linear_mode);
    q_ = interpolate(*disc_, case_.initial_state);
    num_steps_ = int(std::ceil(cfg.time.t_final / cfg.time.dt - 1e-9));
  }

  const Config &config() const { return cfg_; }
  const TestCase &test_case() const { return case_; }
  const Discretization &discretization() const { return *disc_; }
  ShallowWaterOperator &op() { return *op_; }
  const ImexTableau &scheme() const { return tableau_; }
  const StateField &state() const { return q_; }
  int step_index() const { return step_; }
  int num_steps() const { return num_steps_; }
  bool finished() const { return step_ >= num_steps_; }
  double time() const { return step_ >= num_steps_ ? cfg_.time.t_final : step_ * cfg_.time.dt; }

  void step() {
    const double t = time();
    const double t_next = step_ + 1 >= num_steps_ ? cfg_.time.t_final : (step_ + 1) * cfg_.time.dt;
    try {
      q_ = imex_step(*op_, q_, t, t_next - t, tableau_);
    } catch (const dry_state_error &e) {
      throw e.annotated(" [step " + std::to_string(step_) + "]");
    } catch (const solver_error &e) {
      throw solver_error(std::string(e.what()) + " [step " + std::to_string(step_) + "]", e.residual());
    } catch (const error &e) {
      throw solver_error(std::string(e.what()) + " [step " + std::to_string(step_) + "]");
    }
    ++step_;
  }

  /// Sum of mass-weighted total geopotential phi_bar + phi'.
  double total_mass() const {
    double s = 0.0;
    for (int e = 0; e < disc_->num_elements(); ++e) {
      const auto &m = disc_->ops(e).mass_diag;
      for (int k = 0; k < disc_->nodes_per_element(); ++k)
        s += m[k] * (cfg_.physics.phi_bar + q_(e, k, var_phi));
    }
    return s;
  }

  /// 1/2 sum (|U|^2 / phi_bar + phi'^2) mass.
  double energy() const {
    double s = 0.0;
    for (int e = 0; e < disc_->num_elements(); ++e) {
      const auto &m = disc_->ops(e).mass_diag;
      for (int k = 0; k < disc_->nodes_per_element(); ++k) {
        const auto q = q_.at(e, k);
        s += 0.5 * m[k] *
             ((q[var_u] * q[var_u] + q[var_v] * q[var_v]) / cfg_.physics.phi_bar + q[var_phi] * q[var_phi]);
      }
    }
    return s;
  }

  std::optional<std::array<double, 3>> errors() const {
    if (!case_.has_exact())
      return std::nullopt;
    return l2_error(*disc_, q_, case_, time());
  }

private:
  Config cfg_;
  TestCase case_;
  ImexTableau tableau_;
  std::unique_ptr<Discretization> disc_;
  std::unique_ptr<ShallowWaterOperator> op_;
  StateField q_;
  int step_ = 0;
  int num_steps_ = 0;
};

struct RunSummary {
  int steps = 0;
  double final_time = 0.0;
  double initial_mass = 0.0;
  double final_mass = 0.0;
  double max_phi_prime = 0.0;
  std::optional<std::array<double, 3>> errors;
  std::filesystem::path csv_path;
};

/// Marches from 0 to t_final, writing the CSV series and optional VTK snapshots.
inline RunSummary run(const Config &cfg, std::ostream &log) {
  Simulation sim(cfg);
  const std::filesystem::path dir(cfg.output.dir);
  std::filesystem::create_directories(dir);

  RunSummary summary;
  summary.csv_path = dir / cfg.output.csv_series;
  std::ofstream csv(summary.csv_path, std::ios::binary | std::ios::trunc);
  if (!csv)
    throw io_error("cannot write '" + summary.csv_path.string() + "'");
  const bool exact = sim.test_case().has_exact();
  csv << "step,t,mass,energy";
  if (exact)
    csv << ",l2_phi,l2_u,l2_v";
  csv << '\n';
  auto record = [&] {
    csv << sim.step_index() << ',' << format_double(sim.time()) << ',' << format_double(sim.total_mass()) << ','
        << format_double(sim.energy());
    if (auto err = sim.errors())
      csv << ',' << format_double((*err)[0]) << ',' << format_double((*err)[1]) << ','
          << format_double((*err)[2]);
    csv << '\n';
  };
  auto snapshot = [&] {
    if (cfg.output.vtk_every_n_steps > 0 && sim.step_index() % cfg.output.vtk_every_n_steps == 0) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(6) << std::setfill('0') << sim.step_index() << ".vtk";
      write_vtk(sim.discretization(), sim.state(), sim.op().params(), dir / name.str());
    }
  };

  summary.initial_mass = sim.total_mass();
  record();
  snapshot();
  while (!sim.finished()) {
    sim.step();
    record();
    snapshot();
  }
  csv.flush();
  if (!csv)
    throw io_error("failed while writing '" + summary.csv_path.string() + "'");

  summary.steps = sim.step_index();
  summary.final_time = sim.time();
  summary.final_mass = sim.total_mass();
  summary.max_phi_prime = sim.state().max_abs(var_phi);
  summary.errors = sim.errors();

  log << "case " << cfg.case_.name << ", scheme " << cfg.time.scheme << ", " << cfg.mesh.nx << "x"
      << cfg.mesh.ny << " elements, p=" << cfg.disc.order << '\n';
  log << "steps " << summary.steps << ", t = " << format_double(summary.final_time) << '\n';
  log << "mass " << format_double(summary.initial_mass) << " -> " << format_double(summary.final_mass)
      << " (relative drift "
      << format_double(std::abs(summary.final_mass - summary.initial_mass) / std::abs(summary.initial_mass), 3)
      << ")\n";
  log << "max |phi'| " << format_double(summary.max_phi_prime, 6) << '\n';
  if (summary.errors)
    log << "L2 errors phi' " << format_double((*summary.errors)[0], 6) << ", U "
        << format_double((*summary.errors)[1], 6) << ", V " << format_double((*summary.errors)[2], 6) << '\n';
  log << "series written to " << summary.csv_path.string() << '\n';
  return summary;
}

enum class ConvergenceMode { spatial, temporal };

struct ConvergenceRow {
  double level = 0.0; // elements per axis (spatial) or time step (temporal)
  double size = 0.0;  // h or dt
  std::array<double, 3> error{};
  std::array<double, 3> rate{}; // NaN on the first row
};

/// Error table under mesh refinement (levels = elements per axis, run at the
/// configured dt) or time-step refinement (levels = time steps, run on the
/// configured mesh). Rates are log(e_prev / e) / log(size_prev / size).
inline std::vector<ConvergenceRow> convergence(const Config &base, const std::vector<double> &levels,
                                               ConvergenceMode mode, std::ostream &log) {
  if (levels.size() < 2)
    throw invalid_argument("convergence study needs at least two refinement levels");
  std::vector<ConvergenceRow> rows;
  for (double level : levels) {
    Config cfg = base;
    ConvergenceRow row;
    row.level = level;
    if (mode == ConvergenceMode::spatial) {
      const int n = int(std::lround(level));
      if (n < 1 || double(n) != level)
        throw invalid_argument("spatial levels must be positive integers");
      cfg.mesh.nx = n;
      cfg.mesh.ny = n;
      row.size = cfg.mesh.bounds.width() / n;
    } else {
      if (!(level > 0.0))
        throw invalid_argument("temporal levels must be positive time steps");
      cfg.time.dt = level;
      row.size = level;
    }
    validate(cfg);
    Simulation sim(cfg);
    if (!sim.test_case().has_exact())
      throw unsupported("convergence study requires a case with an exact solution");
    while (!sim.finished())
      sim.step();
    row.error = *sim.errors();
    rows.push_back(row);
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int v = 0; v < 3; ++v)
      rows[i].rate[std::size_t(v)] =
          i == 0 ? std::nan("")
                 : std::log(rows[i - 1].error[std::size_t(v)] / rows[i].error[std::size_t(v)]) /
                       std::log(rows[i - 1].size / rows[i].size);

  const std::filesystem::path dir(base.output.dir);
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "convergence.csv", std::ios::binary | std::ios::trunc);
  if (!csv)
    throw io_error("cannot write convergence table");
  csv << "level,size,l2_phi,l2_u,l2_v,rate_phi,rate_u,rate_v\n";
  log << (mode == ConvergenceMode::spatial ? "spatial" : "temporal") << " convergence, case "
      << base.case_.name << ", p=" << base.disc.order << ", scheme " << base.time.scheme << '\n';
  log << std::setw(12) << "level" << std::setw(14) << "l2(phi')" << std::setw(10) << "rate" << std::setw(14)
      << "l2(U)" << std::setw(10) << "rate" << std::setw(14) << "l2(V)" << std::setw(10) << "rate" << '\n';
  for (const auto &r : rows) {
    csv << format_double(r.level) << ',' << format_double(r.size);
    for (double e : r.error)
      csv << ',' << format_double(e);
    for (double rt : r.rate)
      csv << ',' << (std::isnan(rt) ? std::string() : format_double(rt));
    csv << '\n';
    log << std::setw(12) << format_double(r.level, 6);
    for (int v = 0; v < 3; ++v)
      log << std::setw(14) << format_double(r.error[std::size_t(v)], 4) << std::setw(10)
          << (std::isnan(r.rate[std::size_t(v)]) ? std::string("-") : format_double(r.rate[std::size_t(v)], 3));
    log << '\n';
  }
  return rows;
}

} // namespace imexhdg
