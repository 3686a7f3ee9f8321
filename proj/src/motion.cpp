#include "stfr/motion.hpp"

#include <cmath>

namespace stfr {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

bool is_closed_form(const MotionPrescription& m) { return !std::holds_alternative<SineDeformation>(m); }

CircleHelpers circle_helpers(const CircleDeformation& m, double t) {
  const double alpha = t * t * t * (8.0 - 3.0 * t) / 16.0;
  return {alpha, 1.0 + (m.a_a - 1.0) * alpha};
}

double circle_eta(double lambda, double omega, double tau) {
  const double wl = omega * lambda;
  return std::sin(wl + tau * (1.0 - std::cos(wl)));
}

double circle_theta(const CircleDeformation& m, double r0, double theta0, double t) {
  const double t6 = std::pow(t, 6);
  const double r4 = r0 * r0 * r0 * r0;
  const double fg = t6 / (t6 + 0.01) *
                    (16.0 * r4 + circle_eta(t, 10.0, 0.7) * (std::cos(32.0 * std::numbers::pi * r4) - 1.0)) *
                    circle_eta(theta0, 1.0, 0.7);
  return theta0 + m.a_g * fg;
}

Point circle_position(const CircleDeformation& m, Point ref, double t) {
  const double r0 = std::hypot(ref[0], ref[1]);
  const double theta0 = std::atan2(ref[1], ref[0]);
  const auto [alpha, psi] = circle_helpers(m, t);
  const double tg = circle_theta(m, r0, theta0, t);
  // stretch, rotate, then translate y by alpha
  const double sx = psi * r0 * std::cos(tg);
  const double sy = r0 * std::sin(tg) / psi;
  const double rot = m.a_theta * alpha;
  const double c = std::cos(rot);
  const double s = std::sin(rot);
  return {c * sx - s * sy, s * sx + c * sy + alpha};
}

std::vector<Point> node_positions(const MotionPrescription& m, const Mesh& mesh, double t) {
  const auto& ref = mesh.nodes();
  std::vector<Point> out(ref.size());
  std::visit(overloaded{
                 [&](const Stationary&) { out = ref; },
                 [&](const RigidOscillation& r) {
                   for (std::size_t i = 0; i < ref.size(); ++i) {
                     out[i][0] = ref[i][0] + r.ax * std::cos(r.wx * t);
                     out[i][1] = mesh.dim() == 2 ? ref[i][1] + r.ay * std::cos(r.wy * t) : ref[i][1];
                   }
                 },
                 [&](const SineDeformation&) {
                   throw std::invalid_argument("node_positions: SineDeformation is incremental; use deform_step");
                 },
                 [&](const CircleDeformation& c) {
                   if (mesh.dim() != 2) throw std::invalid_argument("CircleDeformation requires a 2D mesh");
                   for (std::size_t i = 0; i < ref.size(); ++i) out[i] = circle_position(c, ref[i], t);
                 },
             },
             m);
  return out;
}

std::vector<Point> deform_step(const SineDeformation& m, std::span<const Point> coords, int dim, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("deform_step: dt must be positive");
  const double wt = m.nt * std::numbers::pi / m.tmax;
  const double wx = m.nx * std::numbers::pi / m.lx;
  const double wy = m.ny * std::numbers::pi / m.ly;
  const double st = std::sin(wt * t);
  std::vector<Point> out(coords.begin(), coords.end());
  for (auto& p : out) {
    const double shape = dim == 2 ? std::sin(wx * p[0]) * std::sin(wy * p[1]) : std::sin(wx * p[0]);
    const double base = dt / m.tmax * st * shape;
    p[0] += m.ax * m.lx * base;
    if (dim == 2) p[1] += m.ay * m.ly * base;
  }
  return out;
}

std::vector<Point> advance_positions(const MotionPrescription& m, const Mesh& mesh, std::span<const Point> coords,
                                     double t, double dt) {
  if (const auto* s = std::get_if<SineDeformation>(&m)) return deform_step(*s, coords, mesh.dim(), t, dt);
  return node_positions(m, mesh, t + dt);
}

}  // namespace stfr
