#pragma once

#include <span>
#include <utility>
#include <vector>

namespace stfr {

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
std::pair<double, double> legendre(int n, double x);

/// n-point Gauss-Legendre rule on [-1, 1]; nodes ascending.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Lagrange basis polynomial L_i of the node set, evaluated at x.
double lagrange_eval(std::span<const double> nodes, int i, double x);

/// Derivative of L_i at x.
double lagrange_deriv(std::span<const double> nodes, int i, double x);

/// Row-major (n x n) differentiation matrix, D[i*n + j] = L_j'(nodes[i]).
std::vector<double> diff_matrix(std::span<const double> nodes);

/// Interpolation matrix from `nodes` to `targets`, row-major (targets x nodes).
std::vector<double> interp_matrix(std::span<const double> nodes, std::span<const double> targets);

/// Left/right Radau correction functions of degree k+1 (the DG-recovering choice).
/// g_L(-1) = 1, g_L(1) = 0, g_R(x) = g_L(-x).
double radau_left(int k, double x);
double radau_left_deriv(int k, double x);

struct CorrectionDerivatives {
  std::vector<double> left;   // g_L'(node_i)
  std::vector<double> right;  // g_R'(node_i)
};
CorrectionDerivatives correction_derivatives(std::span<const double> nodes, int k);

/// Immutable 1D tables for one polynomial degree on Gauss-Legendre points.
class BasisSet {
 public:
  explicit BasisSet(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// D[i*n + j] = L_j'(node_i).
  const std::vector<double>& diff() const { return diff_; }
  double diff(int i, int j) const { return diff_[static_cast<std::size_t>(i * size() + j)]; }
  /// L_j(-1) and L_j(+1).
  const std::vector<double>& extrap_left() const { return extrap_left_; }
  const std::vector<double>& extrap_right() const { return extrap_right_; }
  /// g_L'(node_i) and g_R'(node_i).
  const std::vector<double>& corr_left() const { return corr_left_; }
  const std::vector<double>& corr_right() const { return corr_right_; }

  /// Values L_j(x) for all j.
  std::vector<double> eval_all(double x) const;

 private:
  int degree_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> diff_;
  std::vector<double> extrap_left_;
  std::vector<double> extrap_right_;
  std::vector<double> corr_left_;
  std::vector<double> corr_right_;
};

}  // namespace stfr
