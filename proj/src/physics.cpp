#include "stfr/physics.hpp"

#include <cmath>
#include <sstream>

namespace stfr {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap(double d, double period) {
  if (period <= 0.0) return d;
  return d - period * std::floor(d / period + 0.5);
}
}  // namespace

int n_vars(const EquationSet& eq) {
  return std::visit(overloaded{[](const Euler2D&) { return 4; }, [](const auto&) { return 1; }}, eq);
}

int spatial_dim(const EquationSet& eq) {
  return std::visit(
      overloaded{[](const Advection2D&) { return 2; }, [](const Euler2D&) { return 2; }, [](const auto&) { return 1; }}, eq);
}

std::string equation_name(const EquationSet& eq) {
  return std::visit(overloaded{[](const Advection1D&) { return std::string("advection1d"); },
                               [](const Advection2D&) { return std::string("advection2d"); },
                               [](const Euler2D&) { return std::string("euler2d"); },
                               [](const LinearOde&) { return std::string("linear_ode"); }},
                    eq);
}

Primitive to_primitive(double gamma, const State& q) {
  const double rho = q[0];
  const double u = q[1] / rho;
  const double v = q[2] / rho;
  return {rho, u, v, (gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v))};
}

State to_conservative(double gamma, const Primitive& w) {
  return {w.rho, w.rho * w.u, w.rho * w.v, w.p / (gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v)};
}

void check_admissible(const EquationSet& eq, const State& q) {
  const auto* e = std::get_if<Euler2D>(&eq);
  if (!e) return;
  if (!(q[0] > 0.0)) {
    std::ostringstream os;
    os << "non-physical state: density rho = " << q[0];
    throw NonPhysicalState(os.str());
  }
  const auto w = to_primitive(e->gamma, q);
  if (!(w.p > 0.0)) {
    std::ostringstream os;
    os << "non-physical state: pressure p = " << w.p;
    throw NonPhysicalState(os.str());
  }
}

std::array<State, 2> flux(const EquationSet& eq, const State& q) {
  return std::visit(overloaded{
                        [&](const Advection1D& a) { return std::array<State, 2>{State{a.c * q[0]}, State{}}; },
                        [&](const Advection2D& a) {
                          return std::array<State, 2>{State{a.c1 * q[0]}, State{a.c2 * q[0]}};
                        },
                        [&](const LinearOde&) { return std::array<State, 2>{}; },
                        [&](const Euler2D& e) {
                          check_admissible(eq, q);
                          const auto w = to_primitive(e.gamma, q);
                          const double h = q[3] + w.p;
                          return std::array<State, 2>{
                              State{q[1], q[1] * w.u + w.p, q[1] * w.v, w.u * h},
                              State{q[2], q[2] * w.u, q[2] * w.v + w.p, w.v * h}};
                        },
                    },
                    eq);
}

State st_normal_flux(const EquationSet& eq, const State& q, std::span<const double> n) {
  const int dim = spatial_dim(eq);
  const int nv = n_vars(eq);
  const auto fg = flux(eq, q);
  State out{};
  const double nt = n[static_cast<std::size_t>(dim)];
  for (int v = 0; v < nv; ++v) {
    const auto uv = static_cast<std::size_t>(v);
    out[uv] = n[0] * fg[0][uv] + nt * q[uv];
    if (dim == 2) out[uv] += n[1] * fg[1][uv];
  }
  return out;
}

namespace {

State roe_flux(double gamma, const State& ql, const State& qr, std::span<const double> n) {
  const double nx = n[0], ny = n[1], nt = n[2];
  const double sigma = std::hypot(nx, ny);
  if (sigma < 1e-14) {
    const State& up = nt >= 0.0 ? ql : qr;
    return {nt * up[0], nt * up[1], nt * up[2], nt * up[3]};
  }
  EquationSet eq = Euler2D{gamma};
  check_admissible(eq, ql);
  check_admissible(eq, qr);
  const double mx = nx / sigma, my = ny / sigma;
  const double vgn = -nt / sigma;  // face-normal grid speed
  const auto wl = to_primitive(gamma, ql);
  const auto wr = to_primitive(gamma, qr);
  const double hl = (ql[3] + wl.p) / wl.rho;
  const double hr = (qr[3] + wr.p) / wr.rho;
  const double qnl = wl.u * mx + wl.v * my;
  const double qnr = wr.u * mx + wr.v * my;

  const State fl{wl.rho * qnl, ql[1] * qnl + wl.p * mx, ql[2] * qnl + wl.p * my, wl.rho * hl * qnl};
  const State fr{wr.rho * qnr, qr[1] * qnr + wr.p * mx, qr[2] * qnr + wr.p * my, wr.rho * hr * qnr};

  const double sl = std::sqrt(wl.rho), sr = std::sqrt(wr.rho);
  const double inv = 1.0 / (sl + sr);
  const double rho = sl * sr;
  const double u = (sl * wl.u + sr * wr.u) * inv;
  const double v = (sl * wl.v + sr * wr.v) * inv;
  const double h = (sl * hl + sr * hr) * inv;
  const double a2 = (gamma - 1.0) * (h - 0.5 * (u * u + v * v));
  if (!(a2 > 0.0)) {
    std::ostringstream os;
    os << "non-physical state: Roe-averaged sound speed squared = " << a2;
    throw NonPhysicalState(os.str());
  }
  const double a = std::sqrt(a2);
  const double qn = u * mx + v * my;
  const double qt = -u * my + v * mx;

  const double drho = wr.rho - wl.rho;
  const double dp = wr.p - wl.p;
  const double dqn = qnr - qnl;
  const double dqt = (-wr.u * my + wr.v * mx) - (-wl.u * my + wl.v * mx);

  const double a1 = std::abs(qn - a - vgn) * (dp - rho * a * dqn) / (2.0 * a2);
  const double a_ent = std::abs(qn - vgn) * (drho - dp / a2);
  const double a_sh = std::abs(qn - vgn) * rho * dqt;
  const double a4 = std::abs(qn + a - vgn) * (dp + rho * a * dqn) / (2.0 * a2);

  State diss{};
  diss[0] = a1 + a_ent + a4;
  diss[1] = a1 * (u - a * mx) + a_ent * u - a_sh * my + a4 * (u + a * mx);
  diss[2] = a1 * (v - a * my) + a_ent * v + a_sh * mx + a4 * (v + a * my);
  diss[3] = a1 * (h - a * qn) + a_ent * 0.5 * (u * u + v * v) + a_sh * qt + a4 * (h + a * qn);

  State out{};
  for (std::size_t k = 0; k < 4; ++k)
    out[k] = sigma * (0.5 * (fl[k] + fr[k]) - vgn * 0.5 * (ql[k] + qr[k]) - 0.5 * diss[k]);
  return out;
}

}  // namespace

State common_flux(const EquationSet& eq, const State& ql, const State& qr, std::span<const double> n) {
  return std::visit(overloaded{
                        [&](const Advection1D& a) {
                          const double s = a.c * n[0] + n[1];
                          return State{s * (s >= 0.0 ? ql[0] : qr[0])};
                        },
                        [&](const Advection2D& a) {
                          const double s = a.c1 * n[0] + a.c2 * n[1] + n[2];
                          return State{s * (s >= 0.0 ? ql[0] : qr[0])};
                        },
                        [&](const LinearOde&) {
                          const double s = n[1];
                          return State{s * (s >= 0.0 ? ql[0] : qr[0])};
                        },
                        [&](const Euler2D& e) { return roe_flux(e.gamma, ql, qr, n); },
                    },
                    eq);
}

double st_wave_speed(const EquationSet& eq, const State& q, std::span<const double> n) {
  return std::visit(overloaded{
                        [&](const Advection1D& a) { return std::abs(a.c * n[0] + n[1]); },
                        [&](const Advection2D& a) { return std::abs(a.c1 * n[0] + a.c2 * n[1] + n[2]); },
                        [&](const LinearOde&) { return std::abs(n[1]); },
                        [&](const Euler2D& e) {
                          const auto w = to_primitive(e.gamma, q);
                          const double c = std::sqrt(e.gamma * w.p / w.rho);
                          return std::abs(w.u * n[0] + w.v * n[1] + n[2]) + c * std::hypot(n[0], n[1]);
                        },
                    },
                    eq);
}

State source(const EquationSet& eq, const State& q) {
  if (const auto* o = std::get_if<LinearOde>(&eq)) return State{o->lambda * q[0]};
  return State{};
}

State exact_state(const ExactSolution& sol, double x, double y, double t) {
  return std::visit(overloaded{
                        [&](const Uniform& u) { return u.q; },
                        [&](const SineWave1D& s) { return State{std::sin(s.k * (x - s.c * t))}; },
                        [&](const SineWave2D& s) {
                          const double a = std::sin(s.kx * (x - s.c1 * t));
                          const double b = std::sin(s.ky * (y - s.c2 * t));
                          return State{s.form == SineWave2D::Form::Sum ? a + b : a * b};
                        },
                        [&](const IsentropicVortex& v) {
                          const double dx = wrap(x - v.u0 * t, v.period_x);
                          const double dy = wrap(y - v.v0 * t, v.period_y);
                          const double r2 = (dx * dx + dy * dy) / (v.b * v.b);
                          const double base = 1.0 - 0.5 * (v.gamma - 1.0) * v.umax * v.umax * std::exp(1.0 - r2);
                          const double rho = std::pow(base, 1.0 / (v.gamma - 1.0));
                          const double p = std::pow(base, v.gamma / (v.gamma - 1.0)) / v.gamma;
                          // r sin(theta) = dy, r cos(theta) = dx
                          const double swirl = v.umax / v.b * std::exp(0.5 * (1.0 - r2));
                          const double u = v.u0 - swirl * dy;
                          const double w = v.v0 + swirl * dx;
                          return to_conservative(v.gamma, {rho, u, w, p});
                        },
                    },
                    sol);
}

StateFunction as_state_function(const ExactSolution& sol) {
  return [sol](double x, double y, double t) { return exact_state(sol, x, y, t); };
}

}  // namespace stfr
