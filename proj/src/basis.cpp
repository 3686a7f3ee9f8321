#include "stfr/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stfr {

namespace {

void check_distinct(std::span<const double> nodes) {
  if (nodes.empty()) throw std::invalid_argument("node set is empty");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j])
        throw std::invalid_argument("duplicate interpolation node at index " + std::to_string(j));
}

}  // namespace

std::pair<double, double> legendre(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre: negative degree");
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  double dp_prev = 0.0;
  double dp = 1.0;
  for (int m = 1; m < n; ++m) {
    const double p_next = ((2.0 * m + 1.0) * x * p - m * p_prev) / (m + 1.0);
    // P'_{m+1} = P'_{m-1} + (2m+1) P_m
    const double dp_next = dp_prev + (2.0 * m + 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point, got " + std::to_string(n));
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, root i counted from the right end.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    rule.weights[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

double lagrange_eval(std::span<const double> nodes, int i, double x) {
  check_distinct(nodes);
  if (i < 0 || i >= static_cast<int>(nodes.size())) throw std::invalid_argument("lagrange_eval: index out of range");
  double v = 1.0;
  const double xi = nodes[static_cast<std::size_t>(i)];
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    v *= (x - nodes[j]) / (xi - nodes[j]);
  }
  return v;
}

double lagrange_deriv(std::span<const double> nodes, int i, double x) {
  check_distinct(nodes);
  const auto n = nodes.size();
  const double xi = nodes[static_cast<std::size_t>(i)];
  double sum = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (static_cast<int>(m) == i) continue;
    double term = 1.0 / (xi - nodes[m]);
    for (std::size_t j = 0; j < n; ++j) {
      if (static_cast<int>(j) == i || j == m) continue;
      term *= (x - nodes[j]) / (xi - nodes[j]);
    }
    sum += term;
  }
  return sum;
}

std::vector<double> diff_matrix(std::span<const double> nodes) {
  check_distinct(nodes);
  const auto n = nodes.size();
  std::vector<double> d(n * n, 0.0);
  // Barycentric form: off-diagonal from weights, diagonal as negative row sum.
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < n; ++m)
      if (m != j) w[j] /= (nodes[j] - nodes[m]);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      d[i * n + j] = (w[j] / w[i]) / (nodes[i] - nodes[j]);
      row += d[i * n + j];
    }
    d[i * n + i] = -row;
  }
  return d;
}

std::vector<double> interp_matrix(std::span<const double> nodes, std::span<const double> targets) {
  check_distinct(nodes);
  std::vector<double> m(targets.size() * nodes.size());
  for (std::size_t r = 0; r < targets.size(); ++r)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      m[r * nodes.size() + j] = lagrange_eval(nodes, static_cast<int>(j), targets[r]);
  return m;
}

double radau_left(int k, double x) {
  const double sign = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
  return 0.5 * sign * (legendre(k + 1, x).first - legendre(k, x).first);
}

double radau_left_deriv(int k, double x) {
  const double sign = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
  return 0.5 * sign * (legendre(k + 1, x).second - legendre(k, x).second);
}

CorrectionDerivatives correction_derivatives(std::span<const double> nodes, int k) {
  check_distinct(nodes);
  if (static_cast<int>(nodes.size()) != k + 1)
    throw std::invalid_argument("correction_derivatives: expected k+1 nodes");
  CorrectionDerivatives c;
  c.left.reserve(nodes.size());
  c.right.reserve(nodes.size());
  for (double x : nodes) {
    c.left.push_back(radau_left_deriv(k, x));
    // g_R(x) = g_L(-x)  =>  g_R'(x) = -g_L'(-x)
    c.right.push_back(-radau_left_deriv(k, -x));
  }
  return c;
}

BasisSet::BasisSet(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("BasisSet: negative degree");
  auto rule = gauss_legendre(degree + 1);
  nodes_ = std::move(rule.nodes);
  weights_ = std::move(rule.weights);
  diff_ = diff_matrix(nodes_);
  extrap_left_ = eval_all(-1.0);
  extrap_right_ = eval_all(1.0);
  auto corr = correction_derivatives(nodes_, degree);
  corr_left_ = std::move(corr.left);
  corr_right_ = std::move(corr.right);
}

std::vector<double> BasisSet::eval_all(double x) const {
  std::vector<double> v(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    double p = 1.0;
    for (std::size_t m = 0; m < nodes_.size(); ++m)
      if (m != j) p *= (x - nodes_[m]) / (nodes_[j] - nodes_[m]);
    v[j] = p;
  }
  return v;
}

}  // namespace stfr
