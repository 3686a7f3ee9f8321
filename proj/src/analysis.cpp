#include "stfr/analysis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stfr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Interpolation tables from the solution points to an n-point Gauss rule.
struct QuadTables {
  GaussRule rule;
  std::vector<double> interp;  // rule.size x basis.size
};

QuadTables quad_tables(const BasisSet& b, int n) {
  QuadTables t{gauss_legendre(n), {}};
  t.interp = interp_matrix(b.nodes(), t.rule.nodes);
  return t;
}

/// Tensor interpolation of element nodal values (stride n_vars) to quadrature point (a, c).
double interp_spatial(int dim, int ns, const QuadTables& qt, std::span<const double> vals, std::size_t base, int nv,
                      int var, int a, int c) {
  const double* wa = qt.interp.data() + static_cast<std::size_t>(a * ns);
  if (dim == 1) {
    double s = 0.0;
    for (int i = 0; i < ns; ++i) s += wa[i] * vals[base + static_cast<std::size_t>(i * nv + var)];
    return s;
  }
  const double* wc = qt.interp.data() + static_cast<std::size_t>(c * ns);
  double s = 0.0;
  for (int j = 0; j < ns; ++j) {
    double r = 0.0;
    for (int i = 0; i < ns; ++i) r += wa[i] * vals[base + static_cast<std::size_t>((i + ns * j) * nv + var)];
    s += wc[j] * r;
  }
  return s;
}

}  // namespace

double l2_error_spatial(const Mesh& mesh, std::span<const Point> coords, const BasisSet& space,
                        std::span<const double> values, int n_vars, const StateFunction& exact, double t, int var,
                        int extra) {
  const int dim = mesh.dim();
  const int ns = space.size();
  const int sp = dim == 1 ? ns : ns * ns;
  const auto qt = quad_tables(space, ns + extra);
  const int nq = static_cast<int>(qt.rule.nodes.size());
  const int nc = dim == 1 ? 1 : nq;
  double err = 0.0, vol = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto corners = element_corners(mesh, coords, e);
    const auto base = static_cast<std::size_t>(e * sp * n_vars);
    for (int c = 0; c < nc; ++c)
      for (int a = 0; a < nq; ++a) {
        const double xi = qt.rule.nodes[static_cast<std::size_t>(a)];
        const double eta = dim == 2 ? qt.rule.nodes[static_cast<std::size_t>(c)] : 0.0;
        const auto sm = eval_spatial_map(dim, corners, xi, eta);
        const double j = dim == 1 ? sm.x_xi : sm.det();
        const double w = qt.rule.weights[static_cast<std::size_t>(a)] *
                         (dim == 2 ? qt.rule.weights[static_cast<std::size_t>(c)] : 1.0) * j;
        const double uh = interp_spatial(dim, ns, qt, values, base, n_vars, var, a, c);
        const double ue = exact(sm.x[0], dim == 2 ? sm.x[1] : 0.0, t)[static_cast<std::size_t>(var)];
        err += w * (uh - ue) * (uh - ue);
        vol += w;
      }
  }
  return std::sqrt(err / vol);
}

double l2_error_final(const StateField& field, const SlabGeometry& geom, const Mesh& mesh, const BasisSet& space,
                      const BasisSet& time, const StateFunction& exact, int var, int extra) {
  const auto top = top_values(field, time);
  return l2_error_spatial(mesh, geom.coords_np1(), space, top.values, field.n_vars, exact, geom.t0() + geom.dt(), var,
                          extra);
}

double l2_error_slab(const StateField& field, const SlabGeometry& geom, const BasisSet& space, const BasisSet& time,
                     const StateFunction& exact, int var, int extra) {
  const StLayout& L = geom.layout();
  const int dim = L.dim;
  const int ns = L.ns;
  const int nt = L.nt;
  const int sp = L.spatial_points();
  const int nv = field.n_vars;
  const auto qs = quad_tables(space, ns + extra);
  const auto qtm = quad_tables(time, nt + extra);
  const int nq = static_cast<int>(qs.rule.nodes.size());
  const int nqt = static_cast<int>(qtm.rule.nodes.size());
  const int nc = dim == 1 ? 1 : nq;
  double err = 0.0, vol = 0.0;
  std::vector<double> slice(static_cast<std::size_t>(sp * nv));
  for (int e = 0; e < geom.n_elems(); ++e) {
    const auto cn = geom.corners_n(e);
    const auto cn1 = geom.corners_np1(e);
    for (int b = 0; b < nqt; ++b) {
      const double tau = qtm.rule.nodes[static_cast<std::size_t>(b)];
      const double* wt = qtm.interp.data() + static_cast<std::size_t>(b * nt);
      for (int q = 0; q < sp; ++q)
        for (int v = 0; v < nv; ++v) {
          double s = 0.0;
          for (int m = 0; m < nt; ++m) s += wt[m] * field.at(e, q + sp * m, v);
          slice[static_cast<std::size_t>(q * nv + v)] = s;
        }
      for (int c = 0; c < nc; ++c)
        for (int a = 0; a < nq; ++a) {
          const double xi = qs.rule.nodes[static_cast<std::size_t>(a)];
          const double eta = dim == 2 ? qs.rule.nodes[static_cast<std::size_t>(c)] : 0.0;
          const auto mp = eval_spacetime_map(dim, cn, cn1, geom.t0(), geom.dt(), xi, eta, tau);
          const double w = qtm.rule.weights[static_cast<std::size_t>(b)] * qs.rule.weights[static_cast<std::size_t>(a)] *
                           (dim == 2 ? qs.rule.weights[static_cast<std::size_t>(c)] : 1.0) * mp.jac;
          const double uh = interp_spatial(dim, ns, qs, slice, 0, nv, var, a, c);
          const double ue = exact(mp.xt[0], dim == 2 ? mp.xt[1] : 0.0, mp.xt[static_cast<std::size_t>(dim)])
              [static_cast<std::size_t>(var)];
          err += w * (uh - ue) * (uh - ue);
          vol += w;
        }
    }
  }
  return std::sqrt(err / vol);
}

double domain_integral(const Mesh& mesh, std::span<const Point> coords, const BasisSet& space,
                       std::span<const double> values, int n_vars, int var) {
  const int dim = mesh.dim();
  const int ns = space.size();
  const int sp = dim == 1 ? ns : ns * ns;
  const auto qt = quad_tables(space, ns + 2);
  const int nq = static_cast<int>(qt.rule.nodes.size());
  const int nc = dim == 1 ? 1 : nq;
  double total = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto corners = element_corners(mesh, coords, e);
    const auto base = static_cast<std::size_t>(e * sp * n_vars);
    for (int c = 0; c < nc; ++c)
      for (int a = 0; a < nq; ++a) {
        const double xi = qt.rule.nodes[static_cast<std::size_t>(a)];
        const double eta = dim == 2 ? qt.rule.nodes[static_cast<std::size_t>(c)] : 0.0;
        const auto sm = eval_spatial_map(dim, corners, xi, eta);
        const double j = dim == 1 ? sm.x_xi : sm.det();
        const double w = qt.rule.weights[static_cast<std::size_t>(a)] *
                         (dim == 2 ? qt.rule.weights[static_cast<std::size_t>(c)] : 1.0) * j;
        total += w * interp_spatial(dim, ns, qt, values, base, n_vars, var, a, c);
      }
  }
  return total;
}

double domain_measure(const Mesh& mesh, std::span<const Point> coords) {
  const BasisSet b(0);
  const int sp = 1;
  std::vector<double> ones(static_cast<std::size_t>(mesh.n_elems() * sp), 1.0);
  return domain_integral(mesh, coords, b, ones, 1, 0);
}

std::vector<double> observed_orders(std::span<const double> errors, std::span<const double> sizes) {
  if (errors.size() != sizes.size()) throw std::invalid_argument("observed_orders: length mismatch");
  if (errors.size() < 2) throw std::invalid_argument("observed_orders: need at least two entries");
  std::vector<double> out(errors.size(), kNaN);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0) || sizes[i - 1] == sizes[i]) continue;
    out[i] = std::log(errors[i - 1] / errors[i]) / std::log(sizes[i - 1] / sizes[i]);
  }
  return out;
}

double spectral_slope(std::span<const double> degrees, std::span<const double> errors) {
  if (degrees.size() != errors.size()) throw std::invalid_argument("spectral_slope: length mismatch");
  if (degrees.size() < 2) throw std::invalid_argument("spectral_slope: need at least two points");
  const double n = static_cast<double>(degrees.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (!(errors[i] > 0.0)) throw std::invalid_argument("spectral_slope: errors must be positive");
    const double x = degrees[i];
    const double y = std::log10(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("spectral_slope: degrees must not all coincide");
  return (n * sxy - sx * sy) / den;
}

void ConvergenceReport::compute_orders() {
  for (auto& r : rows) r.order_final = r.order_slab = kNaN;
  if (rows.size() < 2) return;
  std::vector<double> s, ef, es;
  for (const auto& r : rows) {
    s.push_back(r.resolution);
    ef.push_back(r.error_final);
    es.push_back(r.error_slab);
  }
  const auto of = observed_orders(ef, s);
  const auto os = observed_orders(es, s);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].order_final = of[i];
    rows[i].order_slab = os[i];
  }
}

bool ConvergenceReport::monotone() const {
  if (rows.size() < 2) return true;
  const bool inc = rows[1].resolution > rows[0].resolution;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = rows[i].resolution - rows[i - 1].resolution;
    if (inc ? d <= 0.0 : d >= 0.0) return false;
  }
  return true;
}

std::string format_csv(const ConvergenceReport& report) {
  if (report.rows.empty()) throw std::invalid_argument("format_csv: empty report");
  std::ostringstream os;
  os << kCsvHeader << "\n";
  const auto num = [&](double v) {
    if (std::isnan(v)) {
      os << "NA";
    } else {
      os << std::setprecision(10) << v;
    }
  };
  for (const auto& r : report.rows) {
    num(r.resolution);
    os << ',';
    num(r.error_final);
    os << ',';
    num(r.error_slab);
    os << ',';
    num(r.order_final);
    os << ',';
    num(r.order_slab);
    os << ',';
    os << std::fixed << std::setprecision(3) << r.walltime_s << std::defaultfloat;
    os << "\n";
  }
  return os.str();
}

void write_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  const auto text = format_csv(report);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace stfr
