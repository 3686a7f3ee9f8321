#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stfr/analysis.hpp"
#include "stfr/mesh.hpp"
#include "stfr/motion.hpp"
#include "stfr/physics.hpp"
#include "stfr/st_solver.hpp"

namespace stfr {

/// Every offending field of a case file, one message each.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

enum class SolverKind { SpaceTime, Mol, Stfv };

struct MeshSpec {
  enum class Kind { Line, Rect, Disk, File };
  Kind kind = Kind::Line;
  int nx = 8;
  int ny = 8;
  Point lo{0.0, 0.0};
  Point hi{1.0, 1.0};
  int level = 0;
  std::filesystem::path path;
};

struct CaseConfig {
  std::string name = "case";
  EquationSet eq = Advection1D{};
  ExactSolution exact = SineWave1D{};
  MeshSpec mesh;
  MotionPrescription motion = Stationary{};
  bool periodic = true;
  SolverKind solver = SolverKind::SpaceTime;
  int ks = 2;
  int kt = 2;
  double dt = 0.1;
  double t_final = 1.0;
  PseudoControls pseudo;
  std::filesystem::path output = "out";
  bool dump = false;
  nlohmann::json raw;
};

/// Set a dotted key ("mesh.nx=16") in a JSON tree; the value is parsed as JSON when it can be.
void apply_override(nlohmann::json& tree, const std::string& assignment);

CaseConfig parse_case(const nlohmann::json& tree);
CaseConfig load_case(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Build the mesh, refined `refine` times by halving h.
Mesh build_mesh(const CaseConfig& cfg, int refine = 0);

struct RunOutcome {
  ReportRow row;
  Mesh mesh;
  std::vector<Point> coords;
  int n_vars = 1;
  int n_spatial = 1;
  std::vector<double> values;
  long iterations = 0;
  int unconverged_slabs = 0;
};

/// Run from t = 0 to t_final and measure both norms. A non-positive
/// `resolution` records the mesh spacing in the row.
RunOutcome run_case(const CaseConfig& cfg, double resolution = 0.0);

enum class SweepAxis { Space, Time, TemporalDegree };
SweepAxis parse_axis(const std::string& s);

/// Refinement study. Space halves h per level, time halves dt, and the degree axis raises k_t by one.
ConvergenceReport sweep(const CaseConfig& cfg, SweepAxis axis, int levels);

/// Time step used at refinement level `level` of a space sweep.
double space_sweep_dt(const CaseConfig& cfg, int level);

/// Write `<stem>.csv`, `<stem>.dat` (log10 size or degree vs log10 error) and `<stem>.meta`.
std::vector<std::filesystem::path> emit_reports(const ConvergenceReport& report, const std::filesystem::path& dir,
                                                const std::string& stem);

/// Two-column plot data for a report.
std::string format_plot_data(const ConvergenceReport& report);

/// Nodal dump: coordinates of each solution point followed by its variables.
void write_dump(const RunOutcome& out, const BasisSet& space, const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

/// Fast property checks: free-stream preservation, metric identities, finite-volume equivalences.
std::vector<CheckResult> run_checks();

}  // namespace stfr
