#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stfr/basis.hpp"
#include "stfr/geometry.hpp"
#include "stfr/mesh.hpp"
#include "stfr/physics.hpp"
#include "stfr/st_solver.hpp"

namespace stfr {

/// RMS error of nodal values at spatial solution points against `exact` at
/// time t: sqrt(int (u_h - u)^2 dV / V) with (k_s + extra) Gauss points per
/// direction on the mesh at `coords`. Values are indexed (e * n_spatial + q) * n_vars + v.
double l2_error_spatial(const Mesh& mesh, std::span<const Point> coords, const BasisSet& space,
                        std::span<const double> values, int n_vars, const StateFunction& exact, double t, int var = 0,
                        int extra = 2);

/// Final-time error: the slab interpolated to tau = 1, compared at the slab's top.
double l2_error_final(const StateField& field, const SlabGeometry& geom, const Mesh& mesh, const BasisSet& space,
                      const BasisSet& time, const StateFunction& exact, int var = 0, int extra = 2);

/// RMS error over the whole space-time slab, normalized by the slab measure.
double l2_error_slab(const StateField& field, const SlabGeometry& geom, const BasisSet& space, const BasisSet& time,
                     const StateFunction& exact, int var = 0, int extra = 2);

/// int u dV of spatial nodal values on the mesh at `coords`.
double domain_integral(const Mesh& mesh, std::span<const Point> coords, const BasisSet& space,
                       std::span<const double> values, int n_vars, int var = 0);

/// Spatial measure of the mesh at `coords`, by quadrature.
double domain_measure(const Mesh& mesh, std::span<const Point> coords);

/// order_i = log(E_{i-1}/E_i) / log(s_{i-1}/s_i); entry 0 and rows with a
/// non-positive error are NaN.
std::vector<double> observed_orders(std::span<const double> errors, std::span<const double> sizes);

/// Least-squares slope of log10(E_m) against m.
double spectral_slope(std::span<const double> degrees, std::span<const double> errors);

struct ReportRow {
  double resolution = 0.0;
  double error_final = 0.0;
  double error_slab = 0.0;
  double order_final = 0.0;  // NaN where undefined
  double order_slab = 0.0;
  double walltime_s = 0.0;
};

struct ConvergenceReport {
  std::map<std::string, std::string> metadata;
  std::vector<ReportRow> rows;

  /// Recompute the order columns from the error columns.
  void compute_orders();
  /// Resolutions strictly monotone.
  bool monotone() const;
};

inline constexpr const char* kCsvHeader = "resolution,error_final,error_slab,order_final,order_slab,walltime_s";

std::string format_csv(const ConvergenceReport& report);
void write_csv(const ConvergenceReport& report, const std::filesystem::path& path);

}  // namespace stfr
