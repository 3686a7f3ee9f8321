#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stfr/basis.hpp"

using namespace stfr;
using doctest::Approx;

TEST_CASE("gauss_legendre closed forms") {
  const auto r1 = gauss_legendre(1);
  CHECK(std::abs(r1.nodes[0]) < 1e-15);
  CHECK(r1.weights[0] == Approx(2.0));

  const auto r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.nodes[1] == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.weights[0] == Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[1] == Approx(1.0).epsilon(1e-14));

  const auto r3 = gauss_legendre(3);
  CHECK(std::abs(r3.nodes[1]) < 1e-15);
  CHECK(r3.nodes[2] == Approx(std::sqrt(0.6)).epsilon(1e-14));
  CHECK(r3.weights[1] == Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(r3.weights[0] == Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(r3.weights[2] == Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre rejects an empty rule") { CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument); }

TEST_CASE("quadrature exactness up to degree 2n-1") {
  for (int n = 1; n <= 6; ++n) {
    const auto r = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[static_cast<std::size_t>(i)] * std::pow(r.nodes[static_cast<std::size_t>(i)], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(s - exact) <= 1e-13 * std::max(1.0, exact));
    }
  }
}

TEST_CASE("basis set invariants") {
  for (int k = 0; k <= 8; ++k) {
    const BasisSet b(k);
    const auto& x = b.nodes();
    for (int i = 0; i + 1 < b.size(); ++i) CHECK(x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(i + 1)]);
    for (int i = 0; i < b.size(); ++i)
      CHECK(std::abs(x[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(b.size() - 1 - i)]) < 1e-14);
    CHECK(std::accumulate(b.weights().begin(), b.weights().end(), 0.0) == Approx(2.0).epsilon(1e-14));
    for (int i = 0; i < b.size(); ++i) {
      double row = 0.0;
      for (int j = 0; j < b.size(); ++j) row += b.diff(i, j);
      CHECK(std::abs(row) < 1e-13);
    }
    for (double t : {-0.9, -0.3, 0.3, 0.77}) {
      const auto L = b.eval_all(t);
      CHECK(std::accumulate(L.begin(), L.end(), 0.0) == Approx(1.0).epsilon(1e-13));
    }
    for (int i = 0; i < b.size(); ++i)
      CHECK(b.corr_right()[static_cast<std::size_t>(i)] ==
            Approx(-b.corr_left()[static_cast<std::size_t>(b.size() - 1 - i)]).epsilon(1e-13));
  }
}

TEST_CASE("lagrange_eval Kronecker property and endpoint values") {
  const auto r = gauss_legendre(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(lagrange_eval(r.nodes, i, r.nodes[static_cast<std::size_t>(j)]) == Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
  const std::vector<double> two{-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  CHECK(lagrange_eval(two, 0, 1.0) == Approx(-0.3660254).epsilon(1e-7));
  CHECK(lagrange_eval(two, 1, 1.0) == Approx(1.3660254).epsilon(1e-7));
  const std::vector<double> odd{-0.7, 0.1, 0.4, 0.95};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += lagrange_eval(odd, i, 0.3);
  CHECK(s == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("duplicate nodes are rejected") {
  const std::vector<double> dup{0.1, 0.1, 0.5};
  CHECK_THROWS_AS(lagrange_eval(dup, 0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(diff_matrix(dup), std::invalid_argument);
}

TEST_CASE("two-point differentiation matrix") {
  const BasisSet b(1);
  const double h = std::sqrt(3.0) / 2.0;
  CHECK(b.diff(0, 0) == Approx(-h).epsilon(1e-14));
  CHECK(b.diff(0, 1) == Approx(h).epsilon(1e-14));
  CHECK(b.diff(1, 0) == Approx(-h).epsilon(1e-14));
  CHECK(b.diff(1, 1) == Approx(h).epsilon(1e-14));
}

TEST_CASE("derivative and interpolation exactness on P^k") {
  for (int k = 1; k <= 5; ++k) {
    const BasisSet b(k);
    const auto poly = [k](double x) {
      double s = 0.0, xp = 1.0;
      for (int p = 0; p <= k; ++p, xp *= x) s += (0.3 + 0.1 * p) * xp;
      return s;
    };
    const auto dpoly = [k](double x) {
      double s = 0.0, xp = 1.0;
      for (int p = 1; p <= k; ++p, xp *= x) s += p * (0.3 + 0.1 * p) * xp;
      return s;
    };
    std::vector<double> v;
    for (double x : b.nodes()) v.push_back(poly(x));
    for (int i = 0; i < b.size(); ++i) {
      double d = 0.0;
      for (int j = 0; j < b.size(); ++j) d += b.diff(i, j) * v[static_cast<std::size_t>(j)];
      CHECK(d == Approx(dpoly(b.nodes()[static_cast<std::size_t>(i)])).epsilon(1e-12));
    }
    for (double t : {-1.0, -0.41, 0.2, 1.0}) {
      const auto L = b.eval_all(t);
      double s = 0.0;
      for (int j = 0; j < b.size(); ++j) s += L[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
      CHECK(std::abs(s - poly(t)) < 1e-12);
    }
  }
  const BasisSet b(2);
  for (int i = 0; i < 3; ++i) {
    double d = 0.0;
    for (int j = 0; j < 3; ++j) d += b.diff(i, j) * b.nodes()[static_cast<std::size_t>(j)] * b.nodes()[static_cast<std::size_t>(j)];
    CHECK(std::abs(d - 2.0 * b.nodes()[static_cast<std::size_t>(i)]) < 1e-13);
  }
}

TEST_CASE("Radau correction functions") {
  const BasisSet b0(0);
  CHECK(b0.corr_left()[0] == Approx(-0.5).epsilon(1e-14));
  for (int k = 0; k <= 5; ++k) {
    CHECK(radau_left(k, -1.0) == Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(radau_left(k, 1.0)) < 1e-13);
  }
  // orthogonal to P^{k-1}
  const auto q = gauss_legendre(5);
  for (int k = 1; k <= 3; ++k)
    for (int p = 0; p < k; ++p) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i)
        s += q.weights[static_cast<std::size_t>(i)] * radau_left(k, q.nodes[static_cast<std::size_t>(i)]) *
             std::pow(q.nodes[static_cast<std::size_t>(i)], p);
      CHECK(std::abs(s) < 1e-13);
    }
  // endpoint conditions by integrating the derivative tables against g_L
  for (int k = 1; k <= 4; ++k) {
    const BasisSet b(k);
    const auto r = gauss_legendre(k + 3);
    // g_L' is degree k, so it is represented exactly by its nodal values
    double integral = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const auto L = b.eval_all(r.nodes[i]);
      double g = 0.0;
      for (int j = 0; j < b.size(); ++j) g += L[static_cast<std::size_t>(j)] * b.corr_left()[static_cast<std::size_t>(j)];
      integral += r.weights[i] * g;
    }
    CHECK(integral == Approx(-1.0).epsilon(1e-13));
    for (int j = 0; j < b.size(); ++j) {
      const double x = b.nodes()[static_cast<std::size_t>(j)];
      const double h = 1e-5;
      const double fd = (radau_left(k, x + h) - radau_left(k, x - h)) / (2 * h);
      CHECK(b.corr_left()[static_cast<std::size_t>(j)] == Approx(fd).epsilon(1e-8));
    }
  }
}
