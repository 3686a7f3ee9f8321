#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stfr/basis.hpp"
#include "stfr/mesh.hpp"
#include "stfr/motion.hpp"
#include "stfr/physics.hpp"
#include "stfr/st_solver.hpp"

namespace stfr {

/// Nodal values at the spatial solution points, with the mesh they live on.
/// Storage index is (e * n_spatial + q) * n_vars + v.
struct MolField {
  int n_vars = 1;
  int n_elems = 0;
  int n_spatial = 1;
  double t = 0.0;
  std::vector<Point> coords;
  std::vector<double> values;

  std::size_t index(int e, int q, int v) const {
    return (static_cast<std::size_t>(e) * static_cast<std::size_t>(n_spatial) + static_cast<std::size_t>(q)) *
               static_cast<std::size_t>(n_vars) +
           static_cast<std::size_t>(v);
  }
  double& at(int e, int q, int v) { return values[index(e, q, v)]; }
  double at(int e, int q, int v) const { return values[index(e, q, v)]; }
};

/// Per-node (x^{n+1} - x^n) / dt.
std::vector<Point> grid_velocity_step(std::span<const Point> coords_n, std::span<const Point> coords_np1, double dt);

/// du/dt at the solution points for the ALE FR discretization on the mesh
/// at `field.coords` moving with nodal velocity `vg`.
std::vector<double> mol_residual(const MolField& field, std::span<const Point> vg, const EquationSet& eq,
                                 const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space);

/// Right-hand side of a three-stage step, given the stage time and node positions.
using MolRhs = std::function<std::vector<double>(const MolField& stage)>;

/// Three-stage SSP-RK step with the grid velocity frozen over [t, t+dt];
/// stage nodes move linearly from x^n and land on `coords_np1`.
MolField rk3_physical_step(const MolField& field, std::span<const Point> coords_np1, double dt, const EquationSet& eq,
                           const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space);

/// Generic SSP-RK3 update with a caller-supplied right-hand side and fixed nodes.
MolField rk3_step(const MolField& field, double dt, const MolRhs& rhs);

struct MolProblem {
  MotionPrescription motion = Stationary{};
  EquationSet eq = Advection1D{};
  BoundaryCondition bc;
  StateFunction initial;
  int ks = 1;
  double dt = 0.01;
  double t_final = 1.0;
};

MolField mol_initial(const Mesh& mesh, const MolProblem& prob, const BasisSet& space);

/// March from t = 0 to t_final.
MolField run_mol(const Mesh& mesh, const MolProblem& prob);

}  // namespace stfr
