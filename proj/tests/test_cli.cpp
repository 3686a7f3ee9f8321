#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "stfr/cli.hpp"

using namespace stfr;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path kCases = STFR_CASES_DIR;

nlohmann::json wave1d() {
  std::ifstream f(kCases / "wave1d_stationary_p2p2.json");
  return nlohmann::json::parse(f);
}

std::vector<std::string> problems_of(const nlohmann::json& j) {
  try {
    parse_case(j);
  } catch (const ValidationError& e) {
    return e.problems;
  }
  return {};
}

bool mentions(const std::vector<std::string>& ps, const std::string& field) {
  for (const auto& p : ps)
    if (p.find("`" + field + "`") != std::string::npos) return true;
  return false;
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("stfr_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("every bundled case validates") {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(kCases)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().filename().string());
    CHECK_NOTHROW(load_case(entry.path()));
    ++n;
  }
  CHECK(n >= 2);
}

TEST_CASE("stationary wave case runs end to end") {
  const auto cfg = load_case(kCases / "wave1d_stationary_p2p2.json");
  const auto out = run_case(cfg);
  CHECK(std::isfinite(out.row.error_final));
  CHECK(std::isfinite(out.row.error_slab));
  CHECK(out.row.error_final > 0.0);
  CHECK(out.row.error_final < 1e-2);
  CHECK(out.unconverged_slabs == 0);
  CHECK(out.row.resolution == Approx(0.125));
}

TEST_CASE("free-stream case is preserved") {
  const auto out = run_case(load_case(kCases / "freestream_sine_deform.json"));
  CHECK(out.row.error_final <= 1e-11);
}

TEST_CASE("validation names every offending field") {
  auto j = wave1d();
  j["k_s"] = -1;
  CHECK(mentions(problems_of(j), "k_s"));

  j["dt"] = 0.3;
  j["motion"] = "wobble";
  const auto ps = problems_of(j);
  CHECK(mentions(ps, "k_s"));
  CHECK(mentions(ps, "t_final"));
  CHECK(mentions(ps, "motion"));

  auto s = wave1d();
  s["solver"] = "stfv";
  s["equation"] = {{"type", "advection2d"}};
  CHECK(mentions(problems_of(s), "solver"));

  auto m = wave1d();
  m["solver"] = "mol";
  m["k_t"] = -5;
  CHECK(problems_of(m).empty());
}

TEST_CASE("dotted overrides") {
  auto j = wave1d();
  apply_override(j, "mesh.n=16");
  apply_override(j, "name=renamed");
  apply_override(j, "pseudo.cfl=0.5");
  CHECK(j["mesh"]["n"] == 16);
  CHECK(j["name"] == "renamed");
  CHECK(j["pseudo"]["cfl"].get<double>() == Approx(0.5));
  const auto c = parse_case(j);
  CHECK(c.mesh.nx == 16);
  CHECK(c.pseudo.cfl == Approx(0.5));
  CHECK_THROWS(apply_override(j, "no_equals_sign"));
  const auto loaded = load_case(kCases / "wave1d_stationary_p2p2.json", {"k_s=3"});
  CHECK(loaded.ks == 3);
}

TEST_CASE("file meshes resolve next to the case") {
  const auto d = scratch_dir("filemesh");
  write_mesh(make_line_mesh(4, 0.0, 1.0, true), d / "line4.mesh");
  auto j = wave1d();
  j["mesh"] = {{"type", "file"}, {"path", "line4.mesh"}};
  j["dt"] = 0.05;
  {
    std::ofstream f(d / "case.json");
    f << j.dump(2);
  }
  const auto cfg = load_case(d / "case.json");
  CHECK(build_mesh(cfg).n_elems() == 4);
  CHECK_THROWS_AS(sweep(cfg, SweepAxis::Space, 2), ValidationError);
}

TEST_CASE("sweeps") {
  auto j = wave1d();
  j["mesh"]["n"] = 4;
  j["t_final"] = 0.25;
  const auto cfg = parse_case(j);
  CHECK_THROWS_AS(sweep(cfg, SweepAxis::Space, 1), std::invalid_argument);
  const auto rep = sweep(cfg, SweepAxis::Space, 2);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.monotone());
  CHECK(rep.rows[1].error_final < rep.rows[0].error_final);
  CHECK(rep.metadata.at("axis") == "space");
  CHECK(rep.metadata.count("dt_level1") == 1);
  CHECK(space_sweep_dt(cfg, 1) <= space_sweep_dt(cfg, 0));
  CHECK(std::pow(space_sweep_dt(cfg, 1), 5) <= 0.01 * std::pow(0.125, 3) * (1.0 + 1e-12));
  CHECK(parse_axis("time") == SweepAxis::Time);
  CHECK_THROWS_AS(parse_axis("diagonal"), ValidationError);
}

TEST_CASE("runs are deterministic") {
  auto j = wave1d();
  j["t_final"] = 0.25;
  const auto cfg = parse_case(j);
  const auto a = run_case(cfg), b = run_case(cfg);
  CHECK(a.row.error_final == b.row.error_final);
  CHECK(a.row.error_slab == b.row.error_slab);
  CHECK(a.values == b.values);
}

TEST_CASE("report files") {
  ConvergenceReport r;
  r.metadata["case"] = "demo";
  r.rows.push_back({0.1, 1e-3, 2e-3, 0.0, 0.0, 0.1});
  r.rows.push_back({0.05, 1.25e-4, 4e-4, 0.0, 0.0, 0.2});
  r.compute_orders();
  const auto d = scratch_dir("reports");
  const auto files = emit_reports(r, d, "demo");
  REQUIRE(files.size() == 3);
  for (const auto& f : files) CHECK(fs::exists(f));
  std::ifstream csv(d / "demo.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == kCsvHeader);
  std::istringstream dat(format_plot_data(r));
  std::string comment;
  std::getline(dat, comment);
  CHECK(comment.front() == '#');
  double x = 0.0, y = 0.0;
  dat >> x >> y;
  CHECK(x == Approx(-1.0));
  CHECK(y == Approx(-3.0));
  CHECK_THROWS(emit_reports(ConvergenceReport{}, d, "empty"));
  CHECK_THROWS(emit_reports(r, d / "demo.csv" / "sub", "x"));
}

TEST_CASE("property checks pass") {
  for (const auto& c : run_checks()) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
}
