#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "imexhdg/cases.hpp"
#include "imexhdg/errors.hpp"
#include "imexhdg/hdg_implicit.hpp"
#include "imexhdg/imex.hpp"
#include "imexhdg/mesh.hpp"
#include "imexhdg/shallow_water.hpp"

namespace imexhdg {

enum class ConfigErrorKind { missing_file, parse_error, unknown_key, invalid_value, missing_key };

class config_error : public error {
public:
  config_error(ConfigErrorKind kind, const std::string &what, int line = 0)
      : error(what), kind_(kind), line_(line) {}
  ConfigErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }

private:
  ConfigErrorKind kind_;
  int line_;
};

struct Config {
  struct MeshSection {
    int nx = 0, ny = 0;
    Bounds bounds;
    BoundaryKind bc_x = BoundaryKind::wall, bc_y = BoundaryKind::wall;
  } mesh;
  struct DiscSection {
    int order = 2;
    double tau = 0.0; // resolved to sqrt(phi_bar) when not given
  } disc;
  struct PhysicsSection {
    double phi_bar = 1.0, f0 = 0.0, beta = 0.0, drag = 0.0;
  } physics;
  struct TimeSection {
    double dt = 0.0, t_final = 0.0;
    std::string scheme = "ars222";
    Splitting splitting = Splitting::imex;
  } time;
  struct CaseSection {
    std::string name;
    double amplitude = 0.0;
    bool linear_mode = false;
    bool forcing = true;
  } case_;
  struct SolverSection {
    SolverBackend backend = SolverBackend::direct;
    double rel_tol = 1e-10;
    int max_iter = 500;
  } solver;
  struct OutputSection {
    std::string dir = "output";
    int vtk_every_n_steps = 0;
    std::string csv_series = "series.csv";
  } output;

  /// Physics parameters with the case's manufactured source attached when enabled.
  ModelParams model() const {
    ModelParams p;
    p.phi_bar = physics.phi_bar;
    p.f0 = physics.f0;
    p.beta = physics.beta;
    p.drag = physics.drag;
    return p;
  }

  TestCase make_test_case() const { return make_case(case_.name, model(), case_.amplitude); }

  HdgOptions hdg_options() const {
    HdgOptions o;
    o.tau = disc.tau;
    o.backend = solver.backend;
    o.rel_tol = solver.rel_tol;
    o.max_iter = solver.max_iter;
    return o;
  }
};

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct RawValue {
  std::string text;
  int line = 0;
};

inline double parse_double(const std::string &key, const RawValue &v) {
  double out = 0.0;
  const char *first = v.text.data();
  const char *last = first + v.text.size();
  if (!v.text.empty() && *first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out))
    throw config_error(ConfigErrorKind::invalid_value,
                       "line " + std::to_string(v.line) + ": '" + key + "' expects a number, got '" + v.text + "'",
                       v.line);
  return out;
}

inline int parse_int(const std::string &key, const RawValue &v) {
  int out = 0;
  const char *first = v.text.data();
  const char *last = first + v.text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw config_error(ConfigErrorKind::invalid_value,
                       "line " + std::to_string(v.line) + ": '" + key + "' expects an integer, got '" + v.text + "'",
                       v.line);
  return out;
}

inline bool parse_bool(const std::string &key, const RawValue &v) {
  if (v.text == "true" || v.text == "1" || v.text == "yes")
    return true;
  if (v.text == "false" || v.text == "0" || v.text == "no")
    return false;
  throw config_error(ConfigErrorKind::invalid_value,
                     "line " + std::to_string(v.line) + ": '" + key + "' expects true/false, got '" + v.text + "'",
                     v.line);
}

inline BoundaryKind parse_bc(const std::string &key, const RawValue &v) {
  if (v.text == "wall")
    return BoundaryKind::wall;
  if (v.text == "periodic")
    return BoundaryKind::periodic;
  throw config_error(ConfigErrorKind::invalid_value,
                     "line " + std::to_string(v.line) + ": '" + key + "' must be wall or periodic", v.line);
}

inline config_error invalid(const std::string &msg) {
  return config_error(ConfigErrorKind::invalid_value, msg);
}

} // namespace detail

inline const std::vector<std::string> &config_keys() {
  static const std::vector<std::string> keys = {
      "mesh.nx", "mesh.ny", "mesh.xmin", "mesh.xmax", "mesh.ymin", "mesh.ymax", "mesh.bc_x", "mesh.bc_y",
      "disc.order", "disc.tau",
      "physics.phi_bar", "physics.f0", "physics.beta", "physics.drag",
      "time.dt", "time.t_final", "time.scheme", "time.splitting",
      "case.name", "case.amplitude", "case.linear_mode", "case.forcing",
      "solver.backend", "solver.rel_tol", "solver.max_iter",
      "output.dir", "output.vtk_every_n_steps", "output.csv_series"};
  return keys;
}

/// Validates a populated Config; names are resolved here rather than at first use.
inline void validate(Config &cfg) {
  if (cfg.mesh.nx < 1 || cfg.mesh.ny < 1)
    throw detail::invalid("mesh.nx and mesh.ny must be >= 1");
  if (!(cfg.mesh.bounds.xmax > cfg.mesh.bounds.xmin) || !(cfg.mesh.bounds.ymax > cfg.mesh.bounds.ymin))
    throw detail::invalid("mesh bounds are degenerate");
  if (cfg.disc.order < min_order || cfg.disc.order > max_order)
    throw detail::invalid("disc.order must be in [1, 8]");
  if (!(cfg.physics.phi_bar > 0.0))
    throw detail::invalid("physics.phi_bar must be positive");
  if (!(cfg.physics.drag >= 0.0))
    throw detail::invalid("physics.drag must be non-negative");
  if (cfg.disc.tau == 0.0)
    cfg.disc.tau = std::sqrt(cfg.physics.phi_bar);
  if (!(cfg.disc.tau > 0.0))
    throw detail::invalid("disc.tau must be positive");
  if (!(cfg.time.dt > 0.0))
    throw detail::invalid("time.dt must be positive");
  if (!(cfg.time.t_final >= cfg.time.dt))
    throw detail::invalid("time.t_final must be >= time.dt");
  if (!(cfg.solver.rel_tol > 0.0) || cfg.solver.max_iter < 1)
    throw detail::invalid("solver.rel_tol and solver.max_iter must be positive");
  if (cfg.output.vtk_every_n_steps < 0)
    throw detail::invalid("output.vtk_every_n_steps must be >= 0");
  try {
    (void)tableau(cfg.time.scheme);
    (void)cfg.make_test_case();
  } catch (const unknown_scheme &e) {
    throw detail::invalid(e.what());
  } catch (const invalid_argument &e) {
    throw detail::invalid(e.what());
  }
}

/// Parses `key = value` lines with '#' comments. Unknown keys are rejected.
inline Config parse_config(std::istream &in) {
  std::map<std::string, detail::RawValue> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = detail::trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(ConfigErrorKind::parse_error,
                         "line " + std::to_string(lineno) + ": expected 'key = value'", lineno);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error(ConfigErrorKind::parse_error,
                         "line " + std::to_string(lineno) + ": empty key or value", lineno);
    const auto &keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw config_error(ConfigErrorKind::unknown_key,
                         "line " + std::to_string(lineno) + ": unknown key '" + key + "'", lineno);
    if (raw.count(key))
      throw config_error(ConfigErrorKind::parse_error,
                         "line " + std::to_string(lineno) + ": duplicate key '" + key + "'", lineno);
    raw[key] = {value, lineno};
  }

  for (const char *req : {"mesh.nx", "mesh.ny", "time.dt", "time.t_final", "case.name"})
    if (!raw.count(req))
      throw config_error(ConfigErrorKind::missing_key, std::string("missing required key '") + req + "'");

  Config cfg;
  auto get = [&](const std::string &k) -> const detail::RawValue * {
    auto it = raw.find(k);
    return it == raw.end() ? nullptr : &it->second;
  };
  using namespace detail;

  cfg.case_.name = get("case.name")->text;
  const auto &names = case_names();
  if (std::find(names.begin(), names.end(), cfg.case_.name) == names.end())
    throw config_error(ConfigErrorKind::invalid_value, "unknown case '" + cfg.case_.name + "'",
                       get("case.name")->line);

  if (auto *v = get("physics.phi_bar")) cfg.physics.phi_bar = parse_double("physics.phi_bar", *v);
  if (auto *v = get("physics.f0")) cfg.physics.f0 = parse_double("physics.f0", *v);
  if (auto *v = get("physics.beta")) cfg.physics.beta = parse_double("physics.beta", *v);
  if (auto *v = get("physics.drag")) cfg.physics.drag = parse_double("physics.drag", *v);

  // case geometry provides mesh defaults
  const TestCase defaults = make_case(cfg.case_.name, ModelParams{}, 0.0);
  cfg.mesh.bounds = defaults.bounds;
  cfg.mesh.bc_x = defaults.bc_x;
  cfg.mesh.bc_y = defaults.bc_y;

  cfg.mesh.nx = parse_int("mesh.nx", *get("mesh.nx"));
  cfg.mesh.ny = parse_int("mesh.ny", *get("mesh.ny"));
  if (auto *v = get("mesh.xmin")) cfg.mesh.bounds.xmin = parse_double("mesh.xmin", *v);
  if (auto *v = get("mesh.xmax")) cfg.mesh.bounds.xmax = parse_double("mesh.xmax", *v);
  if (auto *v = get("mesh.ymin")) cfg.mesh.bounds.ymin = parse_double("mesh.ymin", *v);
  if (auto *v = get("mesh.ymax")) cfg.mesh.bounds.ymax = parse_double("mesh.ymax", *v);
  if (auto *v = get("mesh.bc_x")) cfg.mesh.bc_x = parse_bc("mesh.bc_x", *v);
  if (auto *v = get("mesh.bc_y")) cfg.mesh.bc_y = parse_bc("mesh.bc_y", *v);

  if (auto *v = get("disc.order")) cfg.disc.order = parse_int("disc.order", *v);
  if (auto *v = get("disc.tau")) {
    cfg.disc.tau = parse_double("disc.tau", *v);
    if (!(cfg.disc.tau > 0.0))
      throw config_error(ConfigErrorKind::invalid_value, "disc.tau must be positive", v->line);
  }

  cfg.time.dt = parse_double("time.dt", *get("time.dt"));
  cfg.time.t_final = parse_double("time.t_final", *get("time.t_final"));
  if (auto *v = get("time.scheme")) {
    cfg.time.scheme = v->text;
    const auto schemes = tableau_names();
    if (std::find(schemes.begin(), schemes.end(), v->text) == schemes.end())
      throw config_error(ConfigErrorKind::invalid_value, "unknown scheme '" + v->text + "'", v->line);
  }
  if (auto *v = get("time.splitting")) {
    if (v->text == "imex")
      cfg.time.splitting = Splitting::imex;
    else if (v->text == "explicit")
      cfg.time.splitting = Splitting::explicit_;
    else
      throw config_error(ConfigErrorKind::invalid_value, "time.splitting must be imex or explicit", v->line);
  }

  cfg.case_.amplitude = cfg.case_.name == "mms_nonlinear" ? 0.05 * cfg.physics.phi_bar
                        : cfg.case_.name == "standing_wave" ? 1e-3 * cfg.physics.phi_bar
                                                            : 0.0;
  if (auto *v = get("case.amplitude")) cfg.case_.amplitude = parse_double("case.amplitude", *v);
  if (auto *v = get("case.linear_mode")) cfg.case_.linear_mode = parse_bool("case.linear_mode", *v);
  if (auto *v = get("case.forcing")) cfg.case_.forcing = parse_bool("case.forcing", *v);

  if (auto *v = get("solver.backend")) {
    if (v->text == "direct")
      cfg.solver.backend = SolverBackend::direct;
    else if (v->text == "gmres")
      cfg.solver.backend = SolverBackend::gmres;
    else
      throw config_error(ConfigErrorKind::invalid_value, "solver.backend must be direct or gmres", v->line);
  }
  if (auto *v = get("solver.rel_tol")) cfg.solver.rel_tol = parse_double("solver.rel_tol", *v);
  if (auto *v = get("solver.max_iter")) cfg.solver.max_iter = parse_int("solver.max_iter", *v);

  if (auto *v = get("output.dir")) cfg.output.dir = v->text;
  if (auto *v = get("output.vtk_every_n_steps"))
    cfg.output.vtk_every_n_steps = parse_int("output.vtk_every_n_steps", *v);
  if (auto *v = get("output.csv_series")) cfg.output.csv_series = v->text;

  validate(cfg);
  return cfg;
}

inline Config load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw config_error(ConfigErrorKind::missing_file, "cannot open configuration file '" + path + "'");
  return parse_config(in);
}

} // namespace imexhdg
