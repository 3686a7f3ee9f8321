#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stfr/analysis.hpp"
#include "stfr/geometry.hpp"
#include "stfr/stfv.hpp"

using namespace stfr;
using doctest::Approx;

namespace {

std::vector<double> uniform_interfaces(int n, double a, double b) {
  std::vector<double> x(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
  return x;
}

double exact_average(double a, double b, double t, double c) {
  const double k = 2.0 * std::numbers::pi;
  return (std::cos(k * (a - c * t)) - std::cos(k * (b - c * t))) / (k * (b - a));
}

double sum_volume(const std::vector<double>& u, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * (x[i + 1] - x[i]);
  return s;
}

/// Solve the periodic upwind Crank-Nicolson system by Jacobi sweeps.
std::vector<double> solve_cn(const std::vector<double>& u0, double dx, double dt, double c) {
  const std::size_t n = u0.size();
  const double r = 0.5 * dt * c / dx;
  std::vector<double> u1 = u0, next(n);
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = (i + n - 1) % n;
      next[i] = (u0[i] - r * (u0[i] - u0[l]) + r * u1[l]) / (1.0 + r);
    }
    u1.swap(next);
  }
  return u1;
}

}  // namespace

TEST_CASE("constant state is preserved on a moving mesh") {
  Fv1dState s;
  s.u.assign(5, 0.8);
  s.x_n = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  s.x_np1 = {0.01, 0.25, 0.38, 0.62, 0.79, 1.01};
  s.dt = 0.05;
  for (const auto& step : {stfv_step_explicit, fvmol_step})
    for (double v : step(s, upwind_ale_flux(1.0))) CHECK(v == Approx(0.8).epsilon(1e-14));
}

TEST_CASE("stationary mesh reduces to forward-Euler upwind") {
  Fv1dState s;
  s.u = {0.1, 0.5, -0.3, 0.9};
  s.x_n = uniform_interfaces(4, 0.0, 1.0);
  s.x_np1 = s.x_n;
  s.dt = 0.1;
  const double nu = 1.0 * s.dt / 0.25;
  const auto out = stfv_step_explicit(s, upwind_ale_flux(1.0));
  for (std::size_t i = 0; i < 4; ++i) {
    const double left = s.u[(i + 3) % 4];
    CHECK(out[i] == Approx(s.u[i] - nu * (s.u[i] - left)).epsilon(1e-14));
  }
}

TEST_CASE("single cell with ghost states") {
  Fv1dState s;
  s.u = {0.6};
  s.x_n = {0.0, 1.0};
  s.x_np1 = {0.1, 1.05};
  s.dt = 0.1;
  s.periodic = false;
  s.ghost_left = 1.0;
  s.ghost_right = 0.0;
  const double ubar = 0.6;
  // left face moves with the flow (relative speed 0), right face at 0.5
  const double f1 = 1.0 * 1.0 - 1.0 * 1.0;
  const double f2 = ubar - 0.5 * ubar;
  const double expect = (ubar * 1.0 - 0.1 * (f2 - f1)) / 0.95;
  CHECK(stfv_step_explicit(s, upwind_ale_flux(1.0))[0] == Approx(expect).epsilon(1e-15));
  CHECK(expect == Approx(ubar).epsilon(1e-15));
}

TEST_CASE("explicit space-time and semi-discrete volume forms agree") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> N(1, 20);
  double worst = 0.0, mass = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = N(rng);
    Fv1dState s;
    s.x_n = uniform_interfaces(n, 0.0, 1.0);
    const double h = 1.0 / n;
    for (int i = 1; i < n; ++i) s.x_n[static_cast<std::size_t>(i)] += 0.3 * h * U(rng);
    s.x_np1 = s.x_n;
    const double shift = 0.2 * h * U(rng);
    for (std::size_t i = 0; i < s.x_np1.size(); ++i) {
      const bool end = i == 0 || i + 1 == s.x_np1.size();
      s.x_np1[i] += end ? shift : shift + 0.1 * h * U(rng);
    }
    s.u.resize(static_cast<std::size_t>(n));
    for (auto& v : s.u) v = U(rng);
    s.dt = 0.2 * h;
    const double c = U(rng);
    const auto a = stfv_step_explicit(s, upwind_ale_flux(c));
    const auto b = fvmol_step(s, upwind_ale_flux(c));
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    mass = std::max(mass, std::abs(sum_volume(a, s.x_np1) - sum_volume(s.u, s.x_n)));
  }
  CHECK(worst <= 1e-14);
  CHECK(mass <= 1e-14);
}

TEST_CASE("first-order convergence on a translating mesh") {
  const double c = 1.0, tf = 0.5;
  std::vector<double> errs, hs;
  for (int n : {32, 64, 128}) {
    const double h = 1.0 / n, dt = 0.4 * h;
    const int steps = static_cast<int>(std::lround(tf / dt));
    const auto base = uniform_interfaces(n, 0.0, 1.0);
    const auto at = [&](double t) {
      auto x = base;
      for (auto& v : x) v += 0.1 * std::sin(2.0 * std::numbers::pi * t);
      return x;
    };
    Fv1dState s;
    s.x_n = at(0.0);
    s.u.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      s.u[ii] = exact_average(s.x_n[ii], s.x_n[ii + 1], 0.0, c);
    }
    s.dt = dt;
    for (int k = 0; k < steps; ++k) {
      s.x_np1 = at((k + 1) * dt);
      s.u = stfv_step_explicit(s, upwind_ale_flux(c));
      s.x_n = s.x_np1;
    }
    double e2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double d = s.u[ii] - exact_average(s.x_n[ii], s.x_n[ii + 1], tf, c);
      e2 += d * d * h;
    }
    errs.push_back(std::sqrt(e2));
    hs.push_back(h);
  }
  const auto ord = observed_orders(errs, hs);
  CHECK(ord.back() == Approx(1.0).epsilon(0.2));
}

TEST_CASE("Crank-Nicolson defect") {
  const int n = 16;
  const double dx = 1.0 / n, dt = 0.05;
  std::vector<double> u0(n);
  for (int i = 0; i < n; ++i) u0[static_cast<std::size_t>(i)] = std::sin(2.0 * std::numbers::pi * (i + 0.5) * dx);
  for (double c : {1.0, 0.3}) {
    const auto u1 = solve_cn(u0, dx, dt, c);
    CHECK(crank_nicolson_check(u0, u1, dx, dt, c) <= 1e-13);
    CHECK(crank_nicolson_check(u0, u0, dx, dt, c) > 1e-3);
  }
  const std::vector<double> zero(n, 0.0);
  CHECK(crank_nicolson_check(zero, zero, dx, dt, 1.0) == 0.0);
  CHECK_THROWS_AS(crank_nicolson_check(zero, std::vector<double>(3, 0.0), dx, dt, 1.0), std::invalid_argument);
}

TEST_CASE("invalid meshes are rejected") {
  Fv1dState s;
  s.u = {1.0, 1.0};
  s.x_n = {0.0, 0.5, 1.0};
  s.x_np1 = {0.0, 1.1, 1.0};
  s.dt = 0.1;
  CHECK_THROWS_AS(stfv_step_explicit(s, upwind_ale_flux(1.0)), GeometryError);
  s.x_np1 = s.x_n;
  s.dt = 0.0;
  CHECK_THROWS_AS(fvmol_step(s, upwind_ale_flux(1.0)), std::invalid_argument);
  s.dt = 0.1;
  s.x_n.pop_back();
  CHECK_THROWS_AS(fvmol_step(s, upwind_ale_flux(1.0)), std::invalid_argument);
}
