#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stfr/basis.hpp"
#include "stfr/geometry.hpp"
#include "stfr/layout.hpp"
#include "stfr/mesh.hpp"
#include "stfr/motion.hpp"
#include "stfr/physics.hpp"

namespace stfr {

/// Nodal conservative values at every space-time solution point of one slab.
/// Storage index is (e * n_points + p) * n_vars + v.
struct StateField {
  StLayout layout;
  int n_vars = 1;
  int n_elems = 0;
  int slab = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  StateField() = default;
  StateField(const StLayout& l, int nv, int ne) : layout(l), n_vars(nv), n_elems(ne) {
    values.assign(static_cast<std::size_t>(ne * l.n_points * nv), 0.0);
  }
  std::size_t index(int e, int p, int v) const {
    return (static_cast<std::size_t>(e) * static_cast<std::size_t>(layout.n_points) + static_cast<std::size_t>(p)) *
               static_cast<std::size_t>(n_vars) +
           static_cast<std::size_t>(v);
  }
  double& at(int e, int p, int v) { return values[index(e, p, v)]; }
  double at(int e, int p, int v) const { return values[index(e, p, v)]; }
  State state(int e, int p) const;
};

/// Nodal values at the spatial solution points of each element, used as the
/// slab's bottom-face state. Storage index is (e * n_spatial + q) * n_vars + v.
struct SlabInflow {
  int n_vars = 1;
  int n_elems = 0;
  int n_spatial = 1;
  std::vector<double> values;

  SlabInflow() = default;
  SlabInflow(int nv, int ne, int ns) : n_vars(nv), n_elems(ne), n_spatial(ns) {
    values.assign(static_cast<std::size_t>(nv * ne * ns), 0.0);
  }
  std::size_t index(int e, int q, int v) const {
    return (static_cast<std::size_t>(e) * static_cast<std::size_t>(n_spatial) + static_cast<std::size_t>(q)) *
               static_cast<std::size_t>(n_vars) +
           static_cast<std::size_t>(v);
  }
  double& at(int e, int q, int v) { return values[index(e, q, v)]; }
  double at(int e, int q, int v) const { return values[index(e, q, v)]; }
  State state(int e, int q) const;
};

/// Exterior data for analytic-Dirichlet faces; periodic pairing comes from the mesh.
struct BoundaryCondition {
  StateFunction exterior;
};

/// Space-time FR residual -(div F)/|J| + S at every solution point.
StateField st_residual(const StateField& field, const SlabGeometry& geom, const SlabInflow& inflow,
                       const EquationSet& eq, const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space,
                       const BasisSet& time);

struct PseudoControls {
  double cfl = 0.9;
  int drop_orders = 10;
  int max_iters = 200000;
  /// Converged once |R| * dtau <= abs_floor * max(1, max|Q|).
  double abs_floor = 1e-14;
  /// Continue (with stats marking the slab unconverged) instead of throwing.
  bool accept_unconverged = false;
};

struct PseudoStats {
  int iterations = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  double dtau = 0.0;
  bool converged = false;
  /// Orders of magnitude dropped, log10(initial / final).
  double drop() const;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, PseudoStats s) : std::runtime_error(what), stats(s) {}
  PseudoStats stats;
};

/// Global pseudo-time step for one slab from the space-time wave speeds.
double pseudo_step(const StateField& field, const SlabGeometry& geom, const EquationSet& eq, double cfl);

/// L2 (root-mean-square) norm over all entries.
double residual_norm(const StateField& r);

/// Recompute the residual `out` at state `q`.
using ResidualEval = std::function<void(const std::vector<double>& q, std::vector<double>& out)>;

/// One three-stage SSP-RK cycle of dq/dtau = R(q) with step h. On entry `r`
/// holds R(q); on exit it holds R at the updated state.
void ssp_rk3_cycle(std::vector<double>& q, std::vector<double>& r, double h, const ResidualEval& eval);

/// Drive the slab residual to zero with three-stage SSP-RK in pseudo time.
PseudoStats pseudo_march(StateField& field, const SlabGeometry& geom, const SlabInflow& inflow, const EquationSet& eq,
                         const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space, const BasisSet& time,
                         const PseudoControls& controls);

/// Sample a state function at the spatial solution points of every element.
SlabInflow sample_spatial(const Mesh& mesh, std::span<const Point> coords, const BasisSet& space, int n_vars,
                          const StateFunction& fn, double t);

/// Values of the slab at the top face, tau = +1.
SlabInflow top_values(const StateField& field, const BasisSet& time);

struct SlabResult {
  StateField field;
  SlabGeometry geom;
  SlabInflow top;
  PseudoStats stats;
};

/// Build the slab geometry, seed by broadcasting the inflow in time, converge,
/// and extract the top-face values.
SlabResult advance_slab(const SlabInflow& inflow, const Mesh& mesh, std::vector<Point> coords_n,
                        std::vector<Point> coords_np1, double t0, double dt, const EquationSet& eq,
                        const BoundaryCondition& bc, const BasisSet& space, const BasisSet& time,
                        const PseudoControls& controls, int slab_index = 0);

struct StProblem {
  MotionPrescription motion = Stationary{};
  EquationSet eq = Advection1D{};
  BoundaryCondition bc;
  StateFunction initial;
  int ks = 1;
  int kt = 1;
  double dt = 0.1;
  double t_final = 1.0;
  PseudoControls controls;
};

struct StRunResult {
  SlabResult last;
  std::vector<Point> final_coords;
  int n_slabs = 0;
  long total_iterations = 0;
  double min_drop = 0.0;
  int unconverged_slabs = 0;
};

/// Initial node coordinates of a prescription (t = 0).
std::vector<Point> initial_coords(const MotionPrescription& m, const Mesh& mesh);

/// Number of whole steps of size dt in [0, t_final]; throws if not an integer multiple.
int step_count(double t_final, double dt);

/// March slab by slab from t = 0 to t_final. `on_slab` sees every converged slab.
StRunResult run_spacetime(const Mesh& mesh, const StProblem& prob,
                          const std::function<void(const SlabResult&)>& on_slab = {});

}  // namespace stfr
