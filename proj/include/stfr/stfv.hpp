#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stfr {

/// One step of a 1D moving-mesh finite-volume problem.
/// Interface coordinates have one more entry than the averages.
struct Fv1dState {
  std::vector<double> u;
  std::vector<double> x_n;
  std::vector<double> x_np1;
  double dt = 0.0;
  /// Periodic pairing of the end interfaces; otherwise ghost values are used.
  bool periodic = true;
  double ghost_left = 0.0;
  double ghost_right = 0.0;
};

/// Interface flux from the left and right states and the interface speed.
using FvFlux = std::function<double(double ul, double ur, double vg)>;

/// Upwind f(u_up) - u_up * vg for linear advection with speed c.
FvFlux upwind_ale_flux(double c);

/// Explicit space-time finite-volume step.
std::vector<double> stfv_step_explicit(const Fv1dState& s, const FvFlux& flux);

/// Forward-Euler step of the semi-discrete volume-weighted system.
std::vector<double> fvmol_step(const Fv1dState& s, const FvFlux& flux);

/// Max-norm defect of the upwind Crank-Nicolson update on a uniform periodic mesh.
double crank_nicolson_check(std::span<const double> un, std::span<const double> unp1, double dx, double dt, double c);

}  // namespace stfr
