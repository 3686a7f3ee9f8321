#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stfr/analysis.hpp"
#include "stfr/mol_solver.hpp"

using namespace stfr;
using doctest::Approx;

namespace {

MolField sampled(const Mesh& m, std::vector<Point> coords, const BasisSet& s, int nv, const StateFunction& f, double t) {
  const auto in = sample_spatial(m, coords, s, nv, f, t);
  MolField out;
  out.n_vars = nv;
  out.n_elems = m.n_elems();
  out.n_spatial = in.n_spatial;
  out.t = t;
  out.coords = std::move(coords);
  out.values = in.values;
  return out;
}

/// Upwind FR for u_t + c u_x = 0 on a uniform periodic line, built from Lagrange products and Legendre derivatives.
std::vector<double> reference_fr(const std::vector<double>& u, const std::vector<double>& xi, int ne, double h, double c) {
  const int n = static_cast<int>(xi.size());
  const int k = n - 1;
  std::vector<double> D(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        double p = 1.0 / (xi[j] - xi[m]);
        for (int l = 0; l < n; ++l)
          if (l != j && l != m) p *= (xi[i] - xi[l]) / (xi[j] - xi[l]);
        s += p;
      }
      D[static_cast<std::size_t>(i * n + j)] = s;
    }
  const auto lag = [&](int j, double x) {
    double p = 1.0;
    for (int l = 0; l < n; ++l)
      if (l != j) p *= (x - xi[l]) / (xi[j] - xi[l]);
    return p;
  };
  const auto edge = [&](int e, double x) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += lag(j, x) * u[static_cast<std::size_t>(e * n + j)];
    return s;
  };
  const double sgn = k % 2 == 0 ? 1.0 : -1.0;
  std::vector<double> out(u.size());
  for (int e = 0; e < ne; ++e) {
    const int el = (e + ne - 1) % ne, er = (e + 1) % ne;
    const double fl = c * edge(e, -1.0), fr = c * edge(e, 1.0);
    const double cl = c * (c >= 0 ? edge(el, 1.0) : edge(e, -1.0));
    const double cr = c * (c >= 0 ? edge(e, 1.0) : edge(er, -1.0));
    for (int i = 0; i < n; ++i) {
      double df = 0.0;
      for (int j = 0; j < n; ++j) df += D[static_cast<std::size_t>(i * n + j)] * c * u[static_cast<std::size_t>(e * n + j)];
      const double dk = legendre(k, xi[i]).second, dk1 = legendre(k + 1, xi[i]).second;
      const double gl = 0.5 * sgn * (dk - dk1), gr = 0.5 * (dk + dk1);
      out[static_cast<std::size_t>(e * n + i)] = -(2.0 / h) * (df + gl * (cl - fl) + gr * (cr - fr));
    }
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("grid velocity from consecutive positions") {
  const std::vector<Point> a{{0.0, 0.0}, {1.0, 0.5}}, b{{0.02, 0.0}, {1.0, 0.49}};
  const auto v = grid_velocity_step(a, b, 0.1);
  CHECK(v[0][0] == Approx(0.2));
  CHECK(v[1][1] == Approx(-0.1));
  CHECK_THROWS_AS(grid_velocity_step(a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(grid_velocity_step(a, std::vector<Point>{{0.0, 0.0}}, 0.1), std::invalid_argument);
}

TEST_CASE("uniform flow has zero rate for any grid velocity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Mesh m = make_rect_mesh(4, 4, {0.0, 0.0}, {1.0, 1.0}, true);
  const auto coords = deform_step(SineDeformation{}, initial_coords(SineDeformation{}, m), 2, 0.0, 0.07);
  std::vector<Point> vg(coords.size());
  for (auto& p : vg) p = {U(rng), U(rng)};
  const State q{1.0, 0.3, -0.2, 2.0};
  const BasisSet s(3);
  const auto f = sampled(m, coords, s, 4, [q](double, double, double) { return q; }, 0.07);
  CHECK(max_abs(mol_residual(f, vg, Euler2D{}, {}, m, s)) <= 1e-12);
}

TEST_CASE("static residual matches an independent FR construction") {
  const int ne = 6;
  const Mesh m = make_line_mesh(ne, 0.0, 1.0, true);
  for (int k = 1; k <= 4; ++k) {
    const BasisSet s(k);
    const auto f = sampled(m, m.nodes(), s, 1, as_state_function(SineWave1D{}), 0.0);
    const std::vector<Point> vg(m.nodes().size(), Point{0.0, 0.0});
    for (double c : {1.0, -0.7}) {
      const auto r = mol_residual(f, vg, Advection1D{c}, {}, m, s);
      const auto oracle = reference_fr(f.values, s.nodes(), ne, 1.0 / ne, c);
      double worst = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - oracle[i]));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("rigid translation is equivalent to a relative-speed static problem") {
  const Mesh m = make_line_mesh(5, 0.0, 1.0, true);
  const BasisSet s(3);
  const double c = 1.0, V = 0.35;
  std::vector<Point> moved = m.nodes();
  for (auto& p : moved) p[0] += 0.13;
  const std::vector<Point> vg(moved.size(), Point{V, 0.0}), zero(moved.size(), Point{0.0, 0.0});
  const auto ic = as_state_function(SineWave1D{});
  const auto fm = sampled(m, moved, s, 1, ic, 0.0);
  MolField fs = fm;
  fs.coords = m.nodes();
  const auto rm = mol_residual(fm, vg, Advection1D{c}, {}, m, s);
  const auto rs = mol_residual(fs, zero, Advection1D{c - V}, {}, m, s);
  for (std::size_t i = 0; i < rm.size(); ++i) CHECK(rm[i] == Approx(rs[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("rk3 step with a constant rate") {
  MolField f;
  f.n_elems = 1;
  f.n_spatial = 3;
  f.values = {1.0, 2.0, 3.0};
  const std::vector<double> r{0.5, -1.0, 0.25};
  const auto g = rk3_step(f, 0.2, [&](const MolField&) { return r; });
  for (std::size_t i = 0; i < 3; ++i) CHECK(g.values[i] == Approx(f.values[i] + 0.2 * r[i]).epsilon(1e-15));
  CHECK(g.t == Approx(0.2));
}

TEST_CASE("free stream survives a hundred deforming steps") {
  const Mesh m = make_rect_mesh(4, 4, {0.0, 0.0}, {1.0, 1.0}, true);
  const State q{1.0, 0.3, -0.2, 2.0};
  MolProblem p{SineDeformation{}, Euler2D{}, {}, [q](double, double, double) { return q; }, 3, 0.002, 0.2};
  const auto f = run_mol(m, p);
  double dev = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) dev = std::max(dev, std::abs(f.values[i] - q[i % 4]));
  CHECK(dev <= 1e-11);
  CHECK(f.t == Approx(0.2));
}

TEST_CASE("third-order time accuracy on a deforming line") {
  const Mesh m = make_line_mesh(10, 0.0, 1.0, true);
  const auto ex = as_state_function(SineWave1D{});
  std::vector<double> errs, dts;
  for (double dt : {0.004, 0.002, 0.001}) {
    MolProblem p{SineDeformation{}, Advection1D{}, {}, ex, 7, dt, 0.2};
    const auto f = run_mol(m, p);
    const BasisSet s(7);
    errs.push_back(l2_error_spatial(m, f.coords, s, f.values, 1, ex, f.t));
    dts.push_back(dt);
  }
  const auto ord = observed_orders(errs, dts);
  CHECK(ord.back() == Approx(3.0).epsilon(0.2 / 3.0));
}

TEST_CASE("domain integral is conserved on a deforming mesh") {
  const Mesh m = make_rect_mesh(4, 4, {0.0, 0.0}, {1.0, 1.0}, true);
  const auto ex = as_state_function(SineWave2D{});
  const StateFunction ic = [ex](double x, double y, double t) { return State{1.0 + ex(x, y, t)[0]}; };
  const BasisSet s(3);
  const double base = domain_integral(m, m.nodes(), s, sampled(m, m.nodes(), s, 1, ic, 0.0).values, 1);
  std::vector<double> drift;
  for (double dt : {0.01, 0.005}) {
    MolProblem p{SineDeformation{}, Advection2D{}, {}, ic, 3, dt, 0.2};
    const auto f = run_mol(m, p);
    drift.push_back(std::abs(domain_integral(m, f.coords, s, f.values, 1) - base));
  }
  for (double d : drift) CHECK(d <= 1e-12);
}
