#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

namespace stfr {

using State = std::array<double, 4>;

class NonPhysicalState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Advection1D {
  double c = 1.0;
};
struct Advection2D {
  double c1 = 0.5;
  double c2 = 0.5;
};
struct Euler2D {
  double gamma = 1.4;
};
/// du/dt = lambda u, no spatial flux. Used to probe the temporal scheme alone.
struct LinearOde {
  double lambda = -1.0;
};

using EquationSet = std::variant<Advection1D, Advection2D, Euler2D, LinearOde>;

int n_vars(const EquationSet& eq);
int spatial_dim(const EquationSet& eq);
std::string equation_name(const EquationSet& eq);

/// Spatial flux components (f, g); g is zero for 1D sets.
std::array<State, 2> flux(const EquationSet& eq, const State& q);

/// n_x f [+ n_y g] + n_t Q for a space-time normal (n_x[, n_y], n_t).
State st_normal_flux(const EquationSet& eq, const State& q, std::span<const double> n);

/// Upwind (advection) or mesh-relative Roe (Euler) common flux; n points out of L.
State common_flux(const EquationSet& eq, const State& ql, const State& qr, std::span<const double> n);

/// Largest |eigenvalue| of the normal flux Jacobian for a non-normalized
/// space-time direction vector.
double st_wave_speed(const EquationSet& eq, const State& q, std::span<const double> n);

/// Pointwise source term (nonzero only for LinearOde).
State source(const EquationSet& eq, const State& q);

/// Throws NonPhysicalState if q is not an admissible Euler state.
void check_admissible(const EquationSet& eq, const State& q);

struct Primitive {
  double rho, u, v, p;
};
Primitive to_primitive(double gamma, const State& q);
State to_conservative(double gamma, const Primitive& w);

// Exact solutions ------------------------------------------------------------

struct Uniform {
  State q{1.0, 0.0, 0.0, 0.0};
};
/// u = sin(k (x - c t)).
struct SineWave1D {
  double c = 1.0;
  double k = 2.0 * 3.14159265358979323846;
};
/// Sum: u = sin(kx (x - c1 t)) + sin(ky (y - c2 t)).
/// Product: u = sin(kx (x - c1 t)) * sin(ky (y - c2 t)).
struct SineWave2D {
  enum class Form { Sum, Product };
  Form form = Form::Sum;
  double c1 = 0.5;
  double c2 = 0.5;
  double kx = 2.0 * 3.14159265358979323846;
  double ky = 2.0 * 3.14159265358979323846;
};
/// Isentropic vortex advected by (U0, V0) from the origin. A positive
/// period wraps the vortex center into [-L/2, L/2) in that direction.
struct IsentropicVortex {
  double u0 = 0.5;
  double v0 = 0.5;
  double umax = 0.25;
  double b = 0.2;
  double gamma = 1.4;
  double period_x = 0.0;
  double period_y = 0.0;
};

using ExactSolution = std::variant<Uniform, SineWave1D, SineWave2D, IsentropicVortex>;

State exact_state(const ExactSolution& sol, double x, double y, double t);

/// Exterior-state provider for analytic boundaries: (x, y, t) -> state.
using StateFunction = std::function<State(double, double, double)>;
StateFunction as_state_function(const ExactSolution& sol);

}  // namespace stfr
