#include "stfr/stfv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stfr/geometry.hpp"

namespace stfr {

namespace {

void validate(const Fv1dState& s) {
  const std::size_t nc = s.u.size();
  if (nc == 0) throw std::invalid_argument("Fv1dState: no cells");
  if (s.x_n.size() != nc + 1 || s.x_np1.size() != nc + 1)
    throw std::invalid_argument("Fv1dState: need one more interface than cells");
  if (!(s.dt > 0.0)) throw std::invalid_argument("Fv1dState: dt must be positive");
  for (std::size_t i = 0; i < nc; ++i) {
    if (!(s.x_n[i + 1] > s.x_n[i])) throw GeometryError("Fv1dState: interfaces at t_n not increasing");
    if (!(s.x_np1[i + 1] > s.x_np1[i])) throw GeometryError("Fv1dState: cell inverted at t_n+1");
  }
}

double left_state(const Fv1dState& s, std::size_t face) {
  if (face > 0) return s.u[face - 1];
  return s.periodic ? s.u.back() : s.ghost_left;
}

double right_state(const Fv1dState& s, std::size_t face) {
  if (face < s.u.size()) return s.u[face];
  return s.periodic ? s.u.front() : s.ghost_right;
}

}  // namespace

FvFlux upwind_ale_flux(double c) {
  return [c](double ul, double ur, double vg) {
    const double up = c - vg >= 0.0 ? ul : ur;
    return c * up - up * vg;
  };
}

std::vector<double> stfv_step_explicit(const Fv1dState& s, const FvFlux& flux) {
  validate(s);
  const std::size_t nc = s.u.size();
  std::vector<double> out(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const double v1 = (s.x_np1[i] - s.x_n[i]) / s.dt;
    const double v2 = (s.x_np1[i + 1] - s.x_n[i + 1]) / s.dt;
    const double f1 = flux(left_state(s, i), right_state(s, i), v1);
    const double f2 = flux(left_state(s, i + 1), right_state(s, i + 1), v2);
    out[i] = (s.u[i] * (s.x_n[i + 1] - s.x_n[i]) - s.dt * (f2 - f1)) / (s.x_np1[i + 1] - s.x_np1[i]);
  }
  return out;
}

std::vector<double> fvmol_step(const Fv1dState& s, const FvFlux& flux) {
  validate(s);
  const std::size_t nc = s.u.size();
  std::vector<double> face(nc + 1);
  for (std::size_t f = 0; f <= nc; ++f) {
    const double vg = (s.x_np1[f] - s.x_n[f]) / s.dt;
    face[f] = flux(left_state(s, f), right_state(s, f), vg);
  }
  std::vector<double> uv(nc);
  for (std::size_t i = 0; i < nc; ++i) uv[i] = s.u[i] * (s.x_n[i + 1] - s.x_n[i]);
  for (std::size_t i = 0; i < nc; ++i) uv[i] -= s.dt * (face[i + 1] - face[i]);
  for (std::size_t i = 0; i < nc; ++i) uv[i] /= s.x_np1[i + 1] - s.x_np1[i];
  return uv;
}

double crank_nicolson_check(std::span<const double> un, std::span<const double> unp1, double dx, double dt, double c) {
  if (un.size() != unp1.size()) throw std::invalid_argument("crank_nicolson_check: size mismatch");
  const std::size_t n = un.size();
  double worst = 0.0;
  const auto upwind = [&](std::span<const double> u, std::size_t face) {
    const std::size_t l = face == 0 ? n - 1 : face - 1;
    const std::size_t r = face % n;
    return c >= 0.0 ? u[l] : u[r];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double f1 = 0.5 * c * (upwind(un, i) + upwind(unp1, i));
    const double f2 = 0.5 * c * (upwind(un, i + 1) + upwind(unp1, i + 1));
    const double d = (unp1[i] - un[i]) * dx + dt * (f2 - f1);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

}  // namespace stfr
