#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stfr/physics.hpp"

using namespace stfr;
using doctest::Approx;

namespace {

std::mt19937_64 rng(11);
std::uniform_real_distribution<double> U(0.0, 1.0);

State random_euler(double gamma) {
  const Primitive w{0.5 + U(rng), U(rng) - 0.5, U(rng) - 0.5, 0.5 + U(rng)};
  return to_conservative(gamma, w);
}

std::array<double, 3> random_normal(int dim) {
  std::array<double, 3> n{};
  double s = 0.0;
  for (int i = 0; i <= dim; ++i) {
    n[static_cast<std::size_t>(i)] = 2.0 * U(rng) - 1.0;
    s += n[static_cast<std::size_t>(i)] * n[static_cast<std::size_t>(i)];
  }
  for (auto& x : n) x /= std::sqrt(s);
  return n;
}

std::span<const double> span_of(const std::array<double, 3>& n, int dim) { return {n.data(), static_cast<std::size_t>(dim + 1)}; }

}  // namespace

TEST_CASE("flux examples") {
  CHECK(flux(Advection1D{1.0}, {0.3})[0][0] == Approx(0.3));
  const auto fg = flux(Advection2D{0.5, 0.5}, {1.0});
  CHECK(fg[0][0] == Approx(0.5));
  CHECK(fg[1][0] == Approx(0.5));
  const auto e = flux(Euler2D{1.4}, {1.0, 0.0, 0.0, 1.0 / 0.4});
  CHECK(std::abs(e[0][0]) < 1e-15);
  CHECK(e[0][1] == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(e[0][2]) < 1e-15);
  CHECK(std::abs(e[0][3]) < 1e-15);
}

TEST_CASE("non-physical Euler states are named") {
  try {
    flux(Euler2D{}, {-1.0, 0.0, 0.0, 1.0});
    FAIL("accepted negative density");
  } catch (const NonPhysicalState& ex) {
    CHECK(std::string(ex.what()).find("density") != std::string::npos);
  }
  try {
    flux(Euler2D{}, {1.0, 2.0, 0.0, 0.5});
    FAIL("accepted negative pressure");
  } catch (const NonPhysicalState& ex) {
    CHECK(std::string(ex.what()).find("pressure") != std::string::npos);
  }
}

TEST_CASE("space-time normal flux") {
  const State q{0.7, 0.0, 0.0, 0.0};
  const std::array<double, 2> nt{0.0, 1.0};
  CHECK(st_normal_flux(Advection1D{}, q, nt)[0] == Approx(0.7));
  const std::array<double, 2> nx{1.0, 0.0};
  CHECK(st_normal_flux(Advection1D{2.0}, q, nx)[0] == Approx(1.4));
  const State qe = random_euler(1.4);
  const std::array<double, 3> t3{0.0, 0.0, 1.0};
  const auto r = st_normal_flux(Euler2D{}, qe, t3);
  for (int v = 0; v < 4; ++v) CHECK(r[static_cast<std::size_t>(v)] == Approx(qe[static_cast<std::size_t>(v)]).epsilon(1e-15));

  // moving 1D face: l * F_n = -dt (f - u vg)
  const double dt = 0.1, dx = 0.02, l = std::hypot(dt, dx), c = 1.0, u = 0.6;
  const std::array<double, 2> n{-dt / l, dx / l};
  const double lf = l * st_normal_flux(Advection1D{c}, {u}, n)[0];
  CHECK(lf == Approx(-dt * (c * u - u * dx / dt)).epsilon(1e-14));
}

TEST_CASE("common flux consistency") {
  for (int trial = 0; trial < 100; ++trial) {
    const State a{2.0 * U(rng) - 1.0};
    const auto n1 = random_normal(1);
    const auto n2 = random_normal(2);
    CHECK(common_flux(Advection1D{1.3}, a, a, span_of(n1, 1))[0] ==
          Approx(st_normal_flux(Advection1D{1.3}, a, span_of(n1, 1))[0]).epsilon(1e-12));
    CHECK(common_flux(Advection2D{0.5, -0.3}, a, a, span_of(n2, 2))[0] ==
          Approx(st_normal_flux(Advection2D{0.5, -0.3}, a, span_of(n2, 2))[0]).epsilon(1e-12));
    const State q = random_euler(1.4);
    const auto cf = common_flux(Euler2D{}, q, q, span_of(n2, 2));
    const auto nf = st_normal_flux(Euler2D{}, q, span_of(n2, 2));
    for (int v = 0; v < 4; ++v) CHECK(std::abs(cf[static_cast<std::size_t>(v)] - nf[static_cast<std::size_t>(v)]) < 1e-12);
  }
}

TEST_CASE("upwind advection flux") {
  const std::array<double, 2> n{1.0, 0.0};
  CHECK(common_flux(Advection1D{1.0}, {0.4}, {-0.2}, n)[0] == Approx(0.4));
  const std::array<double, 2> back{-1.0, 0.0};
  CHECK(common_flux(Advection1D{1.0}, {0.4}, {-0.2}, back)[0] == Approx(0.2));
  // monotone: lies between the two candidate normal fluxes
  for (int trial = 0; trial < 50; ++trial) {
    const auto nn = random_normal(1);
    const State a{U(rng)}, b{U(rng)};
    const double fa = st_normal_flux(Advection1D{}, a, span_of(nn, 1))[0];
    const double fb = st_normal_flux(Advection1D{}, b, span_of(nn, 1))[0];
    const double fc = common_flux(Advection1D{}, a, b, span_of(nn, 1))[0];
    CHECK(fc >= std::min(fa, fb) - 1e-15);
    CHECK(fc <= std::max(fa, fb) + 1e-15);
  }
}

TEST_CASE("Roe flux antisymmetry") {
  for (int trial = 0; trial < 50; ++trial) {
    const State a = random_euler(1.4), b = random_euler(1.4);
    const auto n = random_normal(2);
    const std::array<double, 3> m{-n[0], -n[1], -n[2]};
    const auto f = common_flux(Euler2D{}, a, b, span_of(n, 2));
    const auto g = common_flux(Euler2D{}, b, a, span_of(m, 2));
    for (int v = 0; v < 4; ++v) CHECK(std::abs(f[static_cast<std::size_t>(v)] + g[static_cast<std::size_t>(v)]) < 1e-12);
  }
}

TEST_CASE("static Roe flux recovered when the temporal normal vanishes") {
  // Independent textbook Roe flux for a static x-face.
  const double g = 1.4;
  const State a = to_conservative(g, {1.0, 0.3, 0.1, 1.0});
  const State b = to_conservative(g, {0.8, 0.1, -0.2, 0.7});
  const auto wa = to_primitive(g, a), wb = to_primitive(g, b);
  const double ha = (a[3] + wa.p) / wa.rho, hb = (b[3] + wb.p) / wb.rho;
  const double sa = std::sqrt(wa.rho), sb = std::sqrt(wb.rho);
  const double u = (sa * wa.u + sb * wb.u) / (sa + sb), v = (sa * wa.v + sb * wb.v) / (sa + sb);
  const double h = (sa * ha + sb * hb) / (sa + sb);
  const double c = std::sqrt((g - 1.0) * (h - 0.5 * (u * u + v * v)));
  const double rho = sa * sb;
  const double dr = wb.rho - wa.rho, du = wb.u - wa.u, dv = wb.v - wa.v, dp = wb.p - wa.p;
  const double w1 = std::abs(u - c) * (dp - rho * c * du) / (2 * c * c);
  const double w2 = std::abs(u) * (dr - dp / (c * c));
  const double w3 = std::abs(u) * rho * dv;
  const double w4 = std::abs(u + c) * (dp + rho * c * du) / (2 * c * c);
  const std::array<double, 4> diss{w1 + w2 + w4, w1 * (u - c) + w2 * u + w4 * (u + c), w1 * v + w2 * v + w3 + w4 * v,
                                   w1 * (h - u * c) + w2 * 0.5 * (u * u + v * v) + w3 * v + w4 * (h + u * c)};
  const auto fa = flux(Euler2D{g}, a)[0], fb = flux(Euler2D{g}, b)[0];
  const std::array<double, 3> n{1.0, 0.0, 0.0};
  const auto roe = common_flux(Euler2D{g}, a, b, n);
  for (int k = 0; k < 4; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    CHECK(roe[uk] == Approx(0.5 * (fa[uk] + fb[uk]) - 0.5 * diss[uk]).epsilon(1e-12));
  }
}

TEST_CASE("isentropic vortex values") {
  const IsentropicVortex v;
  const auto far = to_primitive(1.4, exact_state(v, 20.0, 0.0, 0.0));
  CHECK(far.rho == Approx(1.0).epsilon(1e-10));
  CHECK(far.u == Approx(0.5).epsilon(1e-10));
  CHECK(far.v == Approx(0.5).epsilon(1e-10));
  CHECK(far.p == Approx(1.0 / 1.4).epsilon(1e-10));
  const auto c = to_primitive(1.4, exact_state(v, 0.0, 0.0, 0.0));
  const double base = 1.0 - 0.2 * 0.0625 * std::exp(1.0);
  CHECK(c.rho == Approx(std::pow(base, 2.5)).epsilon(1e-13));
  CHECK(c.rho == Approx(0.91721).epsilon(1e-5));
  CHECK(c.p == Approx(0.63289).epsilon(1e-5));
  CHECK(c.u == Approx(0.5).epsilon(1e-14));
  for (int i = 0; i < 20; ++i) {
    const double r = 0.02 * i;
    const auto w = to_primitive(1.4, exact_state(v, r * 0.6, r * 0.8, 0.0));
    CHECK(w.p / std::pow(w.rho, 1.4) == Approx(1.0 / 1.4).epsilon(1e-10));
    const State q = exact_state(v, r * 0.6, r * 0.8, 0.0);
    CHECK(q[3] == Approx(w.p / 0.4 + 0.5 * w.rho * (w.u * w.u + w.v * w.v)).epsilon(1e-14));
  }
  // advected center
  const auto moved = exact_state(v, 0.5, 0.5, 1.0);
  CHECK(moved[0] == Approx(exact_state(v, 0.0, 0.0, 0.0)[0]).epsilon(1e-14));
  IsentropicVortex p = v;
  p.period_x = p.period_y = 4.0;
  CHECK(exact_state(p, -1.5, -1.5, 5.0)[0] == Approx(exact_state(v, 0.0, 0.0, 0.0)[0]).epsilon(1e-13));
}

TEST_CASE("sine waves") {
  CHECK(std::abs(exact_state(SineWave1D{}, 0.25, 0.0, 0.25)[0]) < 1e-15);
  CHECK(exact_state(SineWave1D{}, 0.25, 0.0, 0.0)[0] == Approx(1.0));
  const SineWave2D s;
  CHECK(exact_state(s, 0.25, 0.25, 0.0)[0] == Approx(2.0));
  SineWave2D p;
  p.form = SineWave2D::Form::Product;
  CHECK(exact_state(p, 0.25, 0.75, 0.0)[0] == Approx(-1.0));
  CHECK(exact_state(s, 0.5, 0.5, 1.0)[0] == Approx(exact_state(s, 0.0, 0.0, 0.0)[0]).epsilon(1e-13));
}

TEST_CASE("equation metadata") {
  CHECK(n_vars(Advection1D{}) == 1);
  CHECK(n_vars(Advection2D{}) == 1);
  CHECK(n_vars(Euler2D{}) == 4);
  CHECK(spatial_dim(Advection2D{}) == 2);
  CHECK(spatial_dim(Advection1D{}) == 1);
  CHECK(source(LinearOde{-2.0}, {3.0})[0] == Approx(-6.0));
  CHECK(source(Advection1D{}, {3.0})[0] == 0.0);
}
