#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stfr/basis.hpp"
#include "stfr/layout.hpp"
#include "stfr/mesh.hpp"

namespace stfr {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Jacobians at or below this are treated as degenerate.
inline constexpr double kDegenerateJacobian = 1e-13;

/// Spatial bilinear (2D) or linear (1D) element map evaluated at (xi, eta).
struct SpatialMap {
  Point x{0.0, 0.0};
  double x_xi = 0.0, x_eta = 0.0, y_xi = 0.0, y_eta = 0.0;
  double det() const { return x_xi * y_eta - x_eta * y_xi; }
};
SpatialMap eval_spatial_map(int dim, std::span<const Point> corners, double xi, double eta);

/// Shape-function values of the element corners at (xi, eta).
std::array<double, 4> corner_weights(int dim, double xi, double eta);

/// Linear-in-time space-time element map, as used inside one slab. Rows of
/// `metric` are |J| grad_{x,t}(xi_d) for d = xi[, eta], tau, with the
/// components ordered (x[, y], t).
struct SpaceTimeMap {
  std::array<double, 3> xt{0.0, 0.0, 0.0};
  double jac = 0.0;  // full space-time Jacobian determinant
  double spatial_jac = 0.0;  // |J| tau_t, the spatial determinant at this tau
  std::array<std::array<double, 3>, 3> metric{};
};
SpaceTimeMap eval_spacetime_map(int dim, std::span<const Point> corners_n, std::span<const Point> corners_np1,
                                double t0, double dt, double xi, double eta, double tau);

/// Per-slab geometric data at all solution and flux points.
class SlabGeometry {
 public:
  SlabGeometry() = default;
  SlabGeometry(const Mesh& mesh, std::vector<Point> coords_n, std::vector<Point> coords_np1, double t0, double dt,
               const BasisSet& space, const BasisSet& time);

  const StLayout& layout() const { return layout_; }
  int dim() const { return layout_.dim; }
  int n_elems() const { return n_elems_; }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  const std::vector<Point>& coords_n() const { return coords_n_; }
  const std::vector<Point>& coords_np1() const { return coords_np1_; }
  std::array<Point, 4> corners_n(int e) const { return corners_n_[static_cast<std::size_t>(e)]; }
  std::array<Point, 4> corners_np1(int e) const { return corners_np1_[static_cast<std::size_t>(e)]; }

  /// Full space-time Jacobian at solution point p.
  double jac(int e, int p) const { return jac_[idx(e) + static_cast<std::size_t>(p)]; }
  std::span<const double> jac(int e) const { return {jac_.data() + idx(e), static_cast<std::size_t>(layout_.n_points)}; }
  /// Metric row d, component c, at solution point p.
  double metric(int e, int p, int d, int c) const {
    return metric_[(idx(e) + static_cast<std::size_t>(p)) * nd2() + static_cast<std::size_t>(d * nd() + c)];
  }
  const double* metric_ptr(int e) const { return metric_.data() + idx(e) * nd2(); }
  /// Metric row of the face direction at face point q of spatial face f.
  const double* face_metric(int e, int f, int q) const {
    return face_metric_.data() + face_idx(e, f, q) * static_cast<std::size_t>(nd());
  }
  /// Physical (x[, y], t) at face point q of spatial face f.
  const double* face_xt(int e, int f, int q) const {
    return face_xt_.data() + face_idx(e, f, q) * static_cast<std::size_t>(nd());
  }
  /// Spatial Jacobian at the bottom (side 0) or top (side 1) face, spatial point q.
  double time_face_jac(int e, int side, int q) const {
    const auto sp = static_cast<std::size_t>(layout_.spatial_points());
    return time_jac_[(static_cast<std::size_t>(e) * 2 + static_cast<std::size_t>(side)) * sp + static_cast<std::size_t>(q)];
  }
  /// Physical coordinates of solution point p.
  const double* point_xt(int e, int p) const { return xt_.data() + (idx(e) + static_cast<std::size_t>(p)) * nd(); }

 private:
  std::size_t nd() const { return static_cast<std::size_t>(layout_.dim + 1); }
  std::size_t nd2() const { return nd() * nd(); }
  std::size_t idx(int e) const { return static_cast<std::size_t>(e) * static_cast<std::size_t>(layout_.n_points); }
  std::size_t face_idx(int e, int f, int q) const {
    const auto fq = static_cast<std::size_t>(layout_.face_points(0));
    return (static_cast<std::size_t>(e) * static_cast<std::size_t>(layout_.spatial_faces()) + static_cast<std::size_t>(f)) * fq +
           static_cast<std::size_t>(q);
  }

  StLayout layout_;
  int n_elems_ = 0;
  double t0_ = 0.0;
  double dt_ = 0.0;
  std::vector<Point> coords_n_;
  std::vector<Point> coords_np1_;
  std::vector<std::array<Point, 4>> corners_n_;
  std::vector<std::array<Point, 4>> corners_np1_;
  std::vector<double> jac_;
  std::vector<double> metric_;
  std::vector<double> xt_;
  std::vector<double> face_metric_;
  std::vector<double> face_xt_;
  std::vector<double> time_jac_;
};

SlabGeometry slab_geometry(const Mesh& mesh, std::vector<Point> coords_n, std::vector<Point> coords_np1, double t0,
                           double dt, const BasisSet& space, const BasisSet& time);

/// Flux-reconstruction derivative along one line: D*values plus the Radau
/// lifting of (face value - extrapolated value) at both ends. Exact for
/// polynomials of degree <= k+1 when the face values are exact.
void fr_line_derivative(const BasisSet& b, const double* values, int stride, double left, double right, double* out,
                        int out_stride);

/// Discrete GCL d(|J|tau_t)/dtau + d(|J|xi_t)/dxi [+ d(|J|eta_t)/deta] at
/// every solution point, per element (e * n_points + p).
std::vector<double> gcl_residual(const SlabGeometry& geom, const BasisSet& space, const BasisSet& time);

/// Same discrete divergence applied to the spatial metric components
/// (sum_d d(|J| d xi_d / dx_c)/dxi_d for c = x[, y]); max magnitude.
double metric_identity_residual(const SlabGeometry& geom, const BasisSet& space, const BasisSet& time);

/// Gather element corner coordinates.
std::array<Point, 4> element_corners(const Mesh& mesh, std::span<const Point> coords, int e);

}  // namespace stfr
