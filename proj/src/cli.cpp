#include "stfr/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "stfr/geometry.hpp"
#include "stfr/mol_solver.hpp"
#include "stfr/stfv.hpp"

namespace stfr {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join_problems(const std::vector<std::string>& p) {
  std::string s = "invalid case:";
  for (const auto& m : p) s += "\n  " + m;
  return s;
}

/// Typed field reader that records problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  const json* child(const json& obj, const std::string& key) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    return &*it;
  }

  double number(const json& obj, const std::string& key, double fallback, const std::string& path) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) {
      fail(path + key, "must be a number");
      return fallback;
    }
    return v->get<double>();
  }

  int integer(const json& obj, const std::string& key, int fallback, const std::string& path) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      fail(path + key, "must be an integer");
      return fallback;
    }
    return v->get<int>();
  }

  bool boolean(const json& obj, const std::string& key, bool fallback, const std::string& path) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      fail(path + key, "must be true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string text(const json& obj, const std::string& key, const std::string& fallback, const std::string& path) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) {
      fail(path + key, "must be a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  /// `type` of a sub-object, or the value itself when given as a bare string.
  std::string kind(const json& obj, const std::string& key, const std::string& fallback) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (v->is_string()) return v->get<std::string>();
    if (v->is_object()) return text(*v, "type", fallback, key + ".");
    fail(key, "must be a string or an object with a `type`");
    return fallback;
  }

  Point point(const json& obj, const std::string& key, Point fallback, const std::string& path) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (v->is_number()) return {v->get<double>(), 0.0};
    if (v->is_array() && !v->empty() && v->size() <= 2) {
      Point p{0.0, 0.0};
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) {
          fail(path + key, "entries must be numbers");
          return fallback;
        }
        p[i] = (*v)[i].get<double>();
      }
      return p;
    }
    fail(path + key, "must be a number or an array of one or two numbers");
    return fallback;
  }

  void fail(const std::string& field, const std::string& why) { problems_.push_back("`" + field + "` " + why); }

 private:
  std::vector<std::string>& problems_;
};

const json& sub(const json& tree, const std::string& key) {
  static const json empty = json::object();
  const auto it = tree.find(key);
  if (it == tree.end() || !it->is_object()) return empty;
  return *it;
}

double mesh_length(const MeshSpec& m, int axis) { return m.hi[static_cast<std::size_t>(axis)] - m.lo[static_cast<std::size_t>(axis)]; }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double resolution_of(const CaseConfig& cfg, int refine) {
  switch (cfg.mesh.kind) {
    case MeshSpec::Kind::Line:
    case MeshSpec::Kind::Rect:
      return mesh_length(cfg.mesh, 0) / (cfg.mesh.nx << refine);
    case MeshSpec::Kind::Disk:
      return std::ldexp(1.0, -(cfg.mesh.level + refine));
    case MeshSpec::Kind::File:
      return 1.0;
  }
  return 1.0;
}

/// Cell averages of the first variable by Gauss quadrature.
std::vector<double> cell_averages(std::span<const Point> x, const StateFunction& fn, double t) {
  const auto rule = gauss_legendre(6);
  std::vector<double> u(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i][0], b = x[i + 1][0];
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      s += 0.5 * rule.weights[q] * fn(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q], 0.0, t)[0];
    u[i] = s;
  }
  return u;
}

RunOutcome run_stfv(const CaseConfig& cfg, const Mesh& mesh) {
  const auto& adv = std::get<Advection1D>(cfg.eq);
  const auto exact = as_state_function(cfg.exact);
  std::vector<Point> coords = initial_coords(cfg.motion, mesh);
  Fv1dState s;
  s.periodic = cfg.periodic;
  s.u = cell_averages(coords, exact, 0.0);
  s.dt = cfg.dt;
  const auto rule = upwind_ale_flux(adv.c);
  const int steps = step_count(cfg.t_final, cfg.dt);
  for (int n = 0; n < steps; ++n) {
    const double t0 = n * cfg.dt;
    const auto next = advance_positions(cfg.motion, mesh, coords, t0, cfg.dt);
    s.x_n.resize(coords.size());
    s.x_np1.resize(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
      s.x_n[i] = coords[i][0];
      s.x_np1[i] = next[i][0];
    }
    if (!cfg.periodic) {
      s.ghost_left = exact(s.x_n.front(), 0.0, t0)[0];
      s.ghost_right = exact(s.x_n.back(), 0.0, t0)[0];
    }
    s.u = stfv_step_explicit(s, rule);
    coords = next;
  }
  const auto ref = cell_averages(coords, exact, cfg.t_final);
  double err = 0.0, vol = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double h = coords[i + 1][0] - coords[i][0];
    err += h * (s.u[i] - ref[i]) * (s.u[i] - ref[i]);
    vol += h;
  }
  RunOutcome out{{}, mesh, coords, 1, 1, s.u, 0, 0};
  out.row.error_final = std::sqrt(err / vol);
  out.row.error_slab = kNaN;
  return out;
}

std::string motion_name(const MotionPrescription& m) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Stationary>) return "stationary";
        if constexpr (std::is_same_v<T, RigidOscillation>) return "rigid";
        if constexpr (std::is_same_v<T, SineDeformation>) return "sine";
        return "circle";
      },
      m);
}

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::SpaceTime:
      return "spacetime";
    case SolverKind::Mol:
      return "mol";
    case SolverKind::Stfv:
      return "stfv";
  }
  return "?";
}

std::string num_text(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> p) : std::runtime_error(join_problems(p)), problems(std::move(p)) {}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError({"override `" + assignment + "` must look like key.path=value"});
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError({"override key `" + key + "` has an empty component"});
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

CaseConfig parse_case(const json& tree) {
  std::vector<std::string> problems;
  Reader rd(problems);
  CaseConfig c;
  c.raw = tree;
  if (!tree.is_object()) throw ValidationError({"case file must hold a JSON object"});
  c.name = rd.text(tree, "name", c.name, "");

  const std::string eqn = rd.kind(tree, "equation", "advection1d");
  const json& eqo = sub(tree, "equation");
  if (eqn == "advection1d") {
    c.eq = Advection1D{rd.number(eqo, "c", 1.0, "equation.")};
  } else if (eqn == "advection2d") {
    c.eq = Advection2D{rd.number(eqo, "c1", 0.5, "equation."), rd.number(eqo, "c2", 0.5, "equation.")};
  } else if (eqn == "euler2d") {
    const double g = rd.number(eqo, "gamma", 1.4, "equation.");
    if (!(g > 1.0)) rd.fail("equation.gamma", "must exceed 1");
    c.eq = Euler2D{g};
  } else {
    rd.fail("equation", "must be advection1d, advection2d or euler2d");
  }
  const int dim = spatial_dim(c.eq);

  const std::string bnd = rd.text(tree, "boundary", "periodic", "");
  if (bnd == "periodic") {
    c.periodic = true;
  } else if (bnd == "dirichlet") {
    c.periodic = false;
  } else {
    rd.fail("boundary", "must be periodic or dirichlet");
  }

  const std::string mk = rd.kind(tree, "mesh", dim == 1 ? "line" : "rect");
  const json& mo = sub(tree, "mesh");
  if (mk == "line" || mk == "rect") {
    c.mesh.kind = mk == "line" ? MeshSpec::Kind::Line : MeshSpec::Kind::Rect;
    const int n = rd.integer(mo, "n", 8, "mesh.");
    c.mesh.nx = rd.integer(mo, "nx", n, "mesh.");
    c.mesh.ny = rd.integer(mo, "ny", c.mesh.nx, "mesh.");
    c.mesh.lo = rd.point(mo, "lo", {0.0, 0.0}, "mesh.");
    c.mesh.hi = rd.point(mo, "hi", {1.0, 1.0}, "mesh.");
    if (c.mesh.nx < 1) rd.fail("mesh.nx", "must be at least 1");
    if (mk == "rect" && c.mesh.ny < 1) rd.fail("mesh.ny", "must be at least 1");
    if (!(c.mesh.hi[0] > c.mesh.lo[0]) || (mk == "rect" && !(c.mesh.hi[1] > c.mesh.lo[1])))
      rd.fail("mesh.hi", "must exceed mesh.lo in every direction");
    if ((mk == "line") != (dim == 1)) rd.fail("mesh", "dimension does not match the equation");
  } else if (mk == "disk") {
    c.mesh.kind = MeshSpec::Kind::Disk;
    c.mesh.level = rd.integer(mo, "level", 0, "mesh.");
    if (c.mesh.level < 0) rd.fail("mesh.level", "must be >= 0");
    if (dim != 2) rd.fail("mesh", "disk meshes need a 2D equation");
    if (c.periodic) rd.fail("boundary", "disk meshes need dirichlet boundaries");
  } else if (mk == "file") {
    c.mesh.kind = MeshSpec::Kind::File;
    c.mesh.path = rd.text(mo, "path", "", "mesh.");
    if (c.mesh.path.empty()) rd.fail("mesh.path", "is required for file meshes");
  } else {
    rd.fail("mesh", "must be line, rect, disk or file");
  }

  const std::string xk = rd.kind(tree, "exact", dim == 1 ? "sine1d" : (eqn == "euler2d" ? "vortex" : "sine2d"));
  const json& xo = sub(tree, "exact");
  if (xk == "sine1d") {
    const double c0 = std::holds_alternative<Advection1D>(c.eq) ? std::get<Advection1D>(c.eq).c : 1.0;
    c.exact = SineWave1D{rd.number(xo, "c", c0, "exact."), rd.number(xo, "k", 2.0 * std::numbers::pi, "exact.")};
    if (eqn != "advection1d") rd.fail("exact", "sine1d needs advection1d");
  } else if (xk == "sine2d") {
    SineWave2D w;
    if (const auto* a = std::get_if<Advection2D>(&c.eq)) {
      w.c1 = a->c1;
      w.c2 = a->c2;
    }
    const std::string form = rd.text(xo, "form", "sum", "exact.");
    if (form == "product") {
      w.form = SineWave2D::Form::Product;
    } else if (form != "sum") {
      rd.fail("exact.form", "must be sum or product");
    }
    w.c1 = rd.number(xo, "c1", w.c1, "exact.");
    w.c2 = rd.number(xo, "c2", w.c2, "exact.");
    w.kx = rd.number(xo, "kx", w.kx, "exact.");
    w.ky = rd.number(xo, "ky", w.ky, "exact.");
    c.exact = w;
    if (eqn != "advection2d") rd.fail("exact", "sine2d needs advection2d");
  } else if (xk == "vortex") {
    IsentropicVortex v;
    if (const auto* e = std::get_if<Euler2D>(&c.eq)) v.gamma = e->gamma;
    v.u0 = rd.number(xo, "u0", v.u0, "exact.");
    v.v0 = rd.number(xo, "v0", v.v0, "exact.");
    v.umax = rd.number(xo, "umax", v.umax, "exact.");
    v.b = rd.number(xo, "b", v.b, "exact.");
    const bool wrap = c.periodic && c.mesh.kind == MeshSpec::Kind::Rect;
    v.period_x = rd.number(xo, "period_x", wrap ? mesh_length(c.mesh, 0) : 0.0, "exact.");
    v.period_y = rd.number(xo, "period_y", wrap ? mesh_length(c.mesh, 1) : 0.0, "exact.");
    c.exact = v;
    if (eqn != "euler2d") rd.fail("exact", "vortex needs euler2d");
  } else if (xk == "uniform") {
    Uniform u;
    u.q = {1.0, 0.0, 0.0, 0.0};
    if (const json* q = rd.child(xo, "q")) {
      if (!q->is_array() || q->size() != static_cast<std::size_t>(n_vars(c.eq))) {
        rd.fail("exact.q", "must list one number per conservative variable");
      } else {
        for (std::size_t i = 0; i < q->size(); ++i) {
          if ((*q)[i].is_number()) {
            u.q[i] = (*q)[i].get<double>();
          } else {
            rd.fail("exact.q", "entries must be numbers");
          }
        }
      }
    } else if (eqn == "euler2d") {
      u.q = {1.0, 0.5, 0.25, 2.5};
    }
    c.exact = u;
  } else {
    rd.fail("exact", "must be sine1d, sine2d, vortex or uniform");
  }

  const std::string mot = rd.kind(tree, "motion", "stationary");
  const json& mt = sub(tree, "motion");
  if (mot == "stationary") {
    c.motion = Stationary{};
  } else if (mot == "rigid") {
    RigidOscillation r;
    r.ax = rd.number(mt, "ax", r.ax, "motion.");
    r.ay = rd.number(mt, "ay", r.ay, "motion.");
    r.wx = rd.number(mt, "wx", r.wx, "motion.");
    r.wy = rd.number(mt, "wy", r.wy, "motion.");
    c.motion = r;
  } else if (mot == "sine") {
    SineDeformation s;
    s.ax = rd.number(mt, "ax", s.ax, "motion.");
    s.ay = rd.number(mt, "ay", s.ay, "motion.");
    s.lx = rd.number(mt, "lx", c.mesh.kind == MeshSpec::Kind::Disk ? s.lx : mesh_length(c.mesh, 0), "motion.");
    s.ly = rd.number(mt, "ly", c.mesh.kind == MeshSpec::Kind::Disk ? s.ly : mesh_length(c.mesh, 1), "motion.");
    s.nt = rd.number(mt, "nt", s.nt, "motion.");
    s.nx = rd.number(mt, "nx", s.nx, "motion.");
    s.ny = rd.number(mt, "ny", s.ny, "motion.");
    s.tmax = rd.number(mt, "tmax", s.tmax, "motion.");
    if (!(s.tmax > 0.0)) rd.fail("motion.tmax", "must be positive");
    c.motion = s;
  } else if (mot == "circle") {
    CircleDeformation d;
    d.a_theta = rd.number(mt, "a_theta", d.a_theta, "motion.");
    d.a_a = rd.number(mt, "a_a", d.a_a, "motion.");
    d.a_g = rd.number(mt, "a_g", d.a_g, "motion.");
    c.motion = d;
  } else {
    rd.fail("motion", "must be stationary, rigid, sine or circle");
  }

  const std::string sol = rd.text(tree, "solver", "spacetime", "");
  if (sol == "spacetime") {
    c.solver = SolverKind::SpaceTime;
  } else if (sol == "mol") {
    c.solver = SolverKind::Mol;
  } else if (sol == "stfv") {
    c.solver = SolverKind::Stfv;
    if (eqn != "advection1d") rd.fail("solver", "stfv requires equation advection1d");
  } else {
    rd.fail("solver", "must be spacetime, mol or stfv");
  }

  c.ks = rd.integer(tree, "k_s", c.ks, "");
  c.kt = rd.integer(tree, "k_t", c.kt, "");
  if (c.ks < 0) rd.fail("k_s", "must be >= 0");
  if (c.solver == SolverKind::SpaceTime && c.kt < 0) rd.fail("k_t", "must be >= 0");
  c.dt = rd.number(tree, "dt", c.dt, "");
  c.t_final = rd.number(tree, "t_final", c.t_final, "");
  if (!(c.dt > 0.0)) rd.fail("dt", "must be positive");
  if (!(c.t_final > 0.0)) rd.fail("t_final", "must be positive");
  if (c.dt > 0.0 && c.t_final > 0.0) {
    const double r = c.t_final / c.dt;
    if (std::abs(r - std::round(r)) > 1e-12 * std::max(1.0, r)) rd.fail("t_final", "must be an integer multiple of dt");
  }

  const json& ps = sub(tree, "pseudo");
  c.pseudo.cfl = rd.number(ps, "cfl", c.pseudo.cfl, "pseudo.");
  c.pseudo.drop_orders = rd.integer(ps, "drop_orders", c.pseudo.drop_orders, "pseudo.");
  c.pseudo.max_iters = rd.integer(ps, "max_iters", c.pseudo.max_iters, "pseudo.");
  c.pseudo.abs_floor = rd.number(ps, "abs_floor", c.pseudo.abs_floor, "pseudo.");
  c.pseudo.accept_unconverged = rd.boolean(ps, "accept_unconverged", false, "pseudo.");
  if (!(c.pseudo.cfl > 0.0)) rd.fail("pseudo.cfl", "must be positive");
  if (c.pseudo.drop_orders < 1) rd.fail("pseudo.drop_orders", "must be at least 1");
  if (c.pseudo.max_iters < 1) rd.fail("pseudo.max_iters", "must be at least 1");

  c.output = rd.text(tree, "output", c.output.string(), "");
  c.dump = rd.boolean(tree, "dump", false, "");

  if (!problems.empty()) throw ValidationError(problems);
  return c;
}

CaseConfig load_case(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ValidationError({"cannot open case file " + path.string()});
  json tree = json::parse(f, nullptr, false);
  if (tree.is_discarded()) throw ValidationError({"case file " + path.string() + " is not valid JSON"});
  for (const auto& o : overrides) apply_override(tree, o);
  CaseConfig c = parse_case(tree);
  if (c.mesh.kind == MeshSpec::Kind::File && c.mesh.path.is_relative())
    c.mesh.path = path.parent_path() / c.mesh.path;
  return c;
}

Mesh build_mesh(const CaseConfig& cfg, int refine) {
  const auto& m = cfg.mesh;
  switch (m.kind) {
    case MeshSpec::Kind::Line:
      return make_line_mesh(m.nx << refine, m.lo[0], m.hi[0], cfg.periodic);
    case MeshSpec::Kind::Rect:
      return make_rect_mesh(m.nx << refine, m.ny << refine, m.lo, m.hi, cfg.periodic);
    case MeshSpec::Kind::Disk:
      return make_disk_mesh(m.level + refine);
    case MeshSpec::Kind::File:
      if (refine != 0) throw ValidationError({"`mesh` file meshes cannot be refined"});
      return read_mesh(m.path);
  }
  throw ValidationError({"`mesh` unknown kind"});
}

RunOutcome run_case(const CaseConfig& cfg, double resolution) {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh mesh = build_mesh(cfg);
  if (mesh.dim() != spatial_dim(cfg.eq)) throw ValidationError({"`mesh` dimension does not match the equation"});
  const auto exact = as_state_function(cfg.exact);
  BoundaryCondition bc;
  if (!cfg.periodic) bc.exterior = exact;

  RunOutcome out{{}, mesh, {}, n_vars(cfg.eq), 1, {}, 0, 0};
  if (cfg.solver == SolverKind::Stfv) {
    out = run_stfv(cfg, mesh);
  } else if (cfg.solver == SolverKind::Mol) {
    MolProblem p{cfg.motion, cfg.eq, bc, exact, cfg.ks, cfg.dt, cfg.t_final};
    const BasisSet space(cfg.ks);
    const MolField f = run_mol(mesh, p);
    out.coords = f.coords;
    out.n_spatial = f.n_spatial;
    out.values = f.values;
    out.row.error_final = l2_error_spatial(mesh, f.coords, space, f.values, f.n_vars, exact, f.t);
    out.row.error_slab = kNaN;
  } else {
    StProblem p{cfg.motion, cfg.eq, bc, exact, cfg.ks, cfg.kt, cfg.dt, cfg.t_final, cfg.pseudo};
    StRunResult r;
    try {
      r = run_spacetime(mesh, p);
    } catch (const NonConvergence& e) {
      throw NonConvergence("case " + cfg.name + ": " + e.what(), e.stats);
    }
    const BasisSet space(cfg.ks), time(cfg.kt);
    out.coords = r.final_coords;
    out.n_spatial = r.last.top.n_spatial;
    out.values = r.last.top.values;
    out.iterations = r.total_iterations;
    out.unconverged_slabs = r.unconverged_slabs;
    out.row.error_final = l2_error_final(r.last.field, r.last.geom, mesh, space, time, exact);
    out.row.error_slab = l2_error_slab(r.last.field, r.last.geom, space, time, exact);
  }
  out.row.resolution = resolution > 0.0 ? resolution : resolution_of(cfg, 0);
  out.row.order_final = out.row.order_slab = kNaN;
  out.row.walltime_s = elapsed(t0);
  return out;
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "space") return SweepAxis::Space;
  if (s == "time") return SweepAxis::Time;
  if (s == "degree") return SweepAxis::TemporalDegree;
  throw ValidationError({"`axis` must be space, time or degree"});
}

double space_sweep_dt(const CaseConfig& cfg, int level) {
  if (cfg.solver != SolverKind::SpaceTime) return std::ldexp(cfg.dt, -level);
  const double target = 0.01 * std::pow(resolution_of(cfg, level), cfg.ks + 1);
  double dt = cfg.dt;
  while (std::pow(dt, 2 * cfg.kt + 1) > target && dt > 1e-6 * cfg.dt) dt *= 0.5;
  return dt;
}

ConvergenceReport sweep(const CaseConfig& cfg, SweepAxis axis, int levels) {
  if (levels < 2) throw std::invalid_argument("sweep: levels must be at least 2");
  ConvergenceReport rep;
  rep.metadata["case"] = cfg.name;
  rep.metadata["equation"] = equation_name(cfg.eq);
  rep.metadata["motion"] = motion_name(cfg.motion);
  rep.metadata["solver"] = solver_name(cfg.solver);
  rep.metadata["k_s"] = std::to_string(cfg.ks);
  rep.metadata["k_t"] = std::to_string(cfg.kt);
  rep.metadata["t_final"] = num_text(cfg.t_final);
  rep.metadata["axis"] = axis == SweepAxis::Space ? "space" : axis == SweepAxis::Time ? "time" : "degree";
  for (int l = 0; l < levels; ++l) {
    CaseConfig c = cfg;
    double res = 0.0;
    if (axis == SweepAxis::Space) {
      if (c.mesh.kind == MeshSpec::Kind::File) throw ValidationError({"`mesh` file meshes cannot be swept in space"});
      c.dt = space_sweep_dt(cfg, l);
      c.mesh.nx <<= l;
      c.mesh.ny <<= l;
      c.mesh.level += l;
      res = resolution_of(cfg, l);
      rep.metadata["dt_level" + std::to_string(l)] = num_text(c.dt);
    } else if (axis == SweepAxis::Time) {
      c.dt = std::ldexp(cfg.dt, -l);
      res = c.dt;
    } else {
      c.kt = cfg.kt + l;
      res = c.kt;
    }
    rep.rows.push_back(run_case(c, res).row);
  }
  if (axis != SweepAxis::TemporalDegree) rep.compute_orders();
  if (axis == SweepAxis::TemporalDegree) {
    std::vector<double> deg, err;
    for (const auto& r : rep.rows) {
      deg.push_back(r.resolution);
      err.push_back(r.error_final);
    }
    rep.metadata["spectral_slope"] = num_text(spectral_slope(deg, err));
  }
  return rep;
}

std::string format_plot_data(const ConvergenceReport& report) {
  if (report.rows.empty()) throw std::invalid_argument("format_plot_data: empty report");
  const auto it = report.metadata.find("axis");
  const bool degree = it != report.metadata.end() && it->second == "degree";
  std::ostringstream os;
  os << (degree ? "# degree log10(error)" : "# log10(size) log10(error)") << "\n";
  os << std::setprecision(10);
  for (const auto& r : report.rows) {
    const double x = degree ? r.resolution : std::log10(r.resolution);
    os << x << ' ' << std::log10(r.error_final) << "\n";
  }
  return os.str();
}

std::vector<std::filesystem::path> emit_reports(const ConvergenceReport& report, const std::filesystem::path& dir,
                                                const std::string& stem) {
  if (report.rows.empty()) throw std::invalid_argument("emit_reports: empty report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto csv = dir / (stem + ".csv");
  const auto dat = dir / (stem + ".dat");
  const auto meta = dir / (stem + ".meta");
  write_csv(report, csv);
  const auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + p.string());
  };
  write(dat, format_plot_data(report));
  std::string m;
  for (const auto& [k, v] : report.metadata) m += k + "=" + v + "\n";
  write(meta, m);
  return {csv, dat, meta};
}

void write_dump(const RunOutcome& out, const BasisSet& space, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const int dim = out.mesh.dim();
  const int ns = space.size();
  f << std::setprecision(15);
  f << (dim == 1 ? "x" : "x,y");
  for (int v = 0; v < out.n_vars; ++v) f << ",q" << v;
  f << "\n";
  for (int e = 0; e < out.mesh.n_elems(); ++e) {
    const auto corners = element_corners(out.mesh, out.coords, e);
    for (int q = 0; q < out.n_spatial; ++q) {
      double xi = 0.0, eta = 0.0;
      if (out.n_spatial > 1) {
        xi = space.nodes()[static_cast<std::size_t>(q % ns)];
        eta = dim == 2 ? space.nodes()[static_cast<std::size_t>(q / ns)] : 0.0;
      } else {
        xi = 0.0;
      }
      const auto sm = eval_spatial_map(dim, corners, xi, eta);
      f << sm.x[0];
      if (dim == 2) f << ',' << sm.x[1];
      for (int v = 0; v < out.n_vars; ++v)
        f << ',' << out.values[static_cast<std::size_t>((e * out.n_spatial + q) * out.n_vars + v)];
      f << "\n";
    }
  }
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::vector<CheckResult> run_checks() {
  std::vector<CheckResult> out;
  const State q{1.0, 0.3, -0.2, 2.0};
  const StateFunction uniform = [q](double, double, double) { return q; };
  const Mesh mesh = make_rect_mesh(4, 4, {0.0, 0.0}, {1.0, 1.0}, true);

  {
    StProblem p{SineDeformation{}, Euler2D{}, {}, uniform, 2, 1, 0.05, 0.2, {}};
    const auto r = run_spacetime(mesh, p);
    double dev = 0.0;
    for (std::size_t i = 0; i < r.last.top.values.size(); ++i) dev = std::max(dev, std::abs(r.last.top.values[i] - q[i % 4]));
    out.push_back({"space-time free stream, deforming grid", dev <= 1e-11, dev, 1e-11});
  }
  {
    MolProblem p{SineDeformation{}, Euler2D{}, {}, uniform, 2, 0.005, 0.2};
    const auto f = run_mol(mesh, p);
    double dev = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) dev = std::max(dev, std::abs(f.values[i] - q[i % 4]));
    out.push_back({"method-of-lines free stream, deforming grid", dev <= 1e-11, dev, 1e-11});
  }
  {
    const BasisSet space(3), time(2);
    const auto c0 = initial_coords(SineDeformation{}, mesh);
    const auto c1 = advance_positions(SineDeformation{}, mesh, c0, 0.0, 0.05);
    const SlabGeometry g(mesh, c0, c1, 0.0, 0.05, space, time);
    double worst = 0.0;
    for (double v : gcl_residual(g, space, time)) worst = std::max(worst, std::abs(v));
    out.push_back({"discrete geometric conservation law", worst <= 1e-12, worst, 1e-12});
  }
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      Fv1dState s;
      const int n = 3 + trial % 9;
      s.dt = 0.01 + 0.05 * (U(rng) + 1.0);
      double x = 0.0;
      for (int i = 0; i <= n; ++i) {
        s.x_n.push_back(x);
        s.x_np1.push_back(x + 0.1 * U(rng));
        x += 0.5 + 0.5 * (U(rng) + 1.0);
      }
      s.periodic = false;
      s.ghost_left = U(rng);
      s.ghost_right = U(rng);
      for (int i = 0; i < n; ++i) s.u.push_back(U(rng));
      const auto rule = upwind_ale_flux(U(rng));
      const auto a = stfv_step_explicit(s, rule);
      const auto b = fvmol_step(s, rule);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    out.push_back({"space-time and method-of-lines finite volume agree", worst <= 1e-14, worst, 1e-14});
  }
  return out;
}

}  // namespace stfr
