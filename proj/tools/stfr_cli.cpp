#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stfr/cli.hpp"

namespace {

int run_verb(const std::string& path, const std::vector<std::string>& sets) {
  const auto cfg = stfr::load_case(path, sets);
  const auto out = stfr::run_case(cfg);
  stfr::ConvergenceReport rep;
  rep.metadata["case"] = cfg.name;
  rep.metadata["equation"] = stfr::equation_name(cfg.eq);
  rep.rows.push_back(out.row);
  for (const auto& f : stfr::emit_reports(rep, cfg.output, cfg.name)) std::cout << "wrote " << f.string() << "\n";
  if (cfg.dump) {
    const auto file = cfg.output / (cfg.name + "_solution.csv");
    stfr::write_dump(out, stfr::BasisSet(cfg.solver == stfr::SolverKind::Stfv ? 0 : cfg.ks), file);
    std::cout << "wrote " << file.string() << "\n";
  }
  std::cout << stfr::format_csv(rep);
  if (out.unconverged_slabs > 0) {
    std::cerr << out.unconverged_slabs << " slab(s) stopped before reaching the residual target\n";
    return 2;
  }
  return 0;
}

int sweep_verb(const std::string& path, const std::vector<std::string>& sets, const std::string& axis, int levels) {
  const auto cfg = stfr::load_case(path, sets);
  if (levels < 2) throw stfr::ValidationError({"`levels` must be at least 2"});
  const auto rep = stfr::sweep(cfg, stfr::parse_axis(axis), levels);
  for (const auto& f : stfr::emit_reports(rep, cfg.output, cfg.name + "_" + axis))
    std::cout << "wrote " << f.string() << "\n";
  std::cout << stfr::format_csv(rep);
  if (const auto it = rep.metadata.find("spectral_slope"); it != rep.metadata.end())
    std::cout << "spectral slope " << it->second << "\n";
  return 0;
}

int check_verb() {
  bool ok = true;
  for (const auto& c : stfr::run_checks()) {
    std::printf("%s  %-55s %.3e (limit %.0e)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tolerance);
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order space-time flux reconstruction on moving grids"};
  app.require_subcommand(1);
  std::vector<std::string> sets;
  std::string case_path, axis = "space";
  int levels = 3;

  auto* run = app.add_subcommand("run", "Run one case to its final time");
  run->add_option("case", case_path, "Case file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--set", sets, "Override a key, e.g. --set mesh.nx=16");

  auto* sw = app.add_subcommand("sweep", "Refinement study");
  sw->add_option("case", case_path, "Case file (JSON)")->required()->check(CLI::ExistingFile);
  sw->add_option("--axis", axis, "space, time or degree")->check(CLI::IsMember({"space", "time", "degree"}));
  sw->add_option("--levels", levels, "Number of refinement levels (>= 2)");
  sw->add_option("--set", sets, "Override a key, e.g. --set k_s=3");

  auto* chk = app.add_subcommand("check", "Run the fast property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_verb(case_path, sets);
    if (*sw) return sweep_verb(case_path, sets, axis, levels);
    if (*chk) return check_verb();
  } catch (const stfr::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const stfr::NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
