#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imexhdg/imexhdg.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_solver = 2;

int tableau_check(const std::string &name) {
  const auto tab = imexhdg::tableau(name);
  bool ok = true;
  for (int order = 1; order <= 3; ++order) {
    const auto rep = imexhdg::check_order_conditions(tab, order);
    for (const auto &c : rep.conditions) {
      if (c.order != order)
        continue;
      std::cout << (c.passed ? "pass " : "FAIL ") << "order " << c.order << "  " << c.label << " = "
                << imexhdg::format_double(c.value, 17) << "  (residual "
                << imexhdg::format_double(c.residual, 3) << ")\n";
    }
    if (order <= tab.order)
      ok = ok && rep.all_passed();
  }
  std::cout << name << ": nominal order " << tab.order << (ok ? " verified" : " NOT verified") << '\n';
  return ok ? exit_ok : exit_validation;
}

std::vector<double> parse_levels(const std::string &text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (item.empty())
      throw imexhdg::invalid_argument("empty entry in --levels");
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size())
      throw imexhdg::invalid_argument("bad entry '" + item + "' in --levels");
    if (comma == std::string::npos)
      break;
    pos = comma + 1;
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"IMEX HDG-DG shallow water solver"};
  app.require_subcommand(1);

  std::string run_config;
  auto *run_cmd = app.add_subcommand("run", "time-march a configuration");
  run_cmd->add_option("config", run_config, "configuration file")->required();

  std::string conv_config, conv_levels, conv_mode = "spatial";
  auto *conv_cmd = app.add_subcommand("convergence", "mesh or time-step refinement study");
  conv_cmd->add_option("config", conv_config, "configuration file")->required();
  conv_cmd->add_option("--levels", conv_levels,
                       "comma-separated elements per axis (spatial) or time steps (temporal)")
      ->required();
  conv_cmd->add_option("--mode", conv_mode, "spatial or temporal")
      ->check(CLI::IsMember({"spatial", "temporal"}));

  std::string tab_name;
  auto *tab_cmd = app.add_subcommand("tableau-check", "verify IMEX order conditions");
  tab_cmd->add_option("name", tab_name, "scheme name (ars111, ars222, ars233)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (*run_cmd) {
      imexhdg::run(imexhdg::load_config(run_config), std::cout);
      return exit_ok;
    }
    if (*conv_cmd) {
      const auto cfg = imexhdg::load_config(conv_config);
      const auto mode =
          conv_mode == "temporal" ? imexhdg::ConvergenceMode::temporal : imexhdg::ConvergenceMode::spatial;
      imexhdg::convergence(cfg, parse_levels(conv_levels), mode, std::cout);
      return exit_ok;
    }
    return tableau_check(tab_name);
  } catch (const imexhdg::config_error &e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_validation;
  } catch (const imexhdg::invalid_argument &e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return exit_validation;
  } catch (const imexhdg::unknown_scheme &e) {
    std::cerr << e.what() << '\n';
    return exit_validation;
  } catch (const imexhdg::unsupported &e) {
    std::cerr << e.what() << '\n';
    return exit_validation;
  } catch (const imexhdg::io_error &e) {
    std::cerr << "io error: " << e.what() << '\n';
    return exit_solver;
  } catch (const imexhdg::error &e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const std::invalid_argument &e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return exit_validation;
  }
}
