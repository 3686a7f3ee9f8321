#pragma once

#include <numbers>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "stfr/mesh.hpp"

namespace stfr {

struct Stationary {};

/// x = x0 + A_x cos(w_x t), y = y0 + A_y cos(w_y t).
struct RigidOscillation {
  double ax = 0.1;
  double ay = 0.1;
  double wx = 2.0 * std::numbers::pi;
  double wy = 2.0 * std::numbers::pi;
};

/// Incremental sine deformation; one explicit displacement per time step.
struct SineDeformation {
  double ax = 0.1;
  double ay = 0.1;
  double lx = 1.0;
  double ly = 1.0;
  double nt = 0.5;
  double nx = 4.0;
  double ny = 4.0;
  double tmax = 0.2;
};

/// Rotating, stretching, translating disk with a radial/azimuthal perturbation.
struct CircleDeformation {
  double a_theta = std::numbers::pi;
  double a_a = 1.5;
  double a_g = 0.15;
};

using MotionPrescription = std::variant<Stationary, RigidOscillation, SineDeformation, CircleDeformation>;

bool is_closed_form(const MotionPrescription& m);

/// Node coordinates at time t, as a pure function of reference positions.
/// Throws std::invalid_argument for the incremental SineDeformation.
std::vector<Point> node_positions(const MotionPrescription& m, const Mesh& mesh, double t);

/// One explicit displacement increment from t to t + dt using positions at t.
std::vector<Point> deform_step(const SineDeformation& m, std::span<const Point> coords, int dim, double t, double dt);

/// Positions at t + dt given positions at t: closed-form evaluation or one increment.
std::vector<Point> advance_positions(const MotionPrescription& m, const Mesh& mesh, std::span<const Point> coords,
                                     double t, double dt);

struct CircleHelpers {
  double alpha;
  double psi;
};
CircleHelpers circle_helpers(const CircleDeformation& m, double t);
/// Symmetry-breaking perturbation sin(w*l + tau*(1 - cos(w*l))).
double circle_eta(double lambda, double omega, double tau);
double circle_theta(const CircleDeformation& m, double r0, double theta0, double t);
Point circle_position(const CircleDeformation& m, Point ref, double t);

}  // namespace stfr
