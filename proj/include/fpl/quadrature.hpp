#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fpl {

template <typename Scalar = double>
struct QuadratureRule1D {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;

  int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
template <typename Scalar>
void legendre_pair(int n, Scalar x, Scalar& pn, Scalar& pn1) {
  Scalar p0 = Scalar(1), p1 = x;
  if (n == 0) {
    pn = p0;
    pn1 = Scalar(0);
    return;
  }
  for (int j = 2; j <= n; ++j) {
    const Scalar p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / Scalar(j);
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pn1 = p0;
}

}  // namespace detail

/// m-point Gauss-Legendre rule on [-1, 1], exact for degree 2m-1.
template <typename Scalar = double>
QuadratureRule1D<Scalar> gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre needs m >= 1");
  QuadratureRule1D<Scalar> rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (i + Scalar(0.75)) / (m + Scalar(0.5)));
    Scalar pn{}, pn1{}, dp{};
    for (int it = 0; it < 100; ++it) {
      detail::legendre_pair(m, x, pn, pn1);
      dp = m * (x * pn - pn1) / (x * x - Scalar(1));
      const Scalar dx = pn / dp;
      x -= dx;
      if (std::abs(dx) <= std::numeric_limits<Scalar>::epsilon()) break;
    }
    detail::legendre_pair(m, x, pn, pn1);
    dp = m * (x * pn - pn1) / (x * x - Scalar(1));
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = Scalar(0);
  return rule;
}

/// m-point Gauss-Lobatto rule on [-1, 1] (endpoints included), exact for
/// degree 2m-3.
template <typename Scalar = double>
QuadratureRule1D<Scalar> gauss_lobatto(int m) {
  if (m < 2) throw std::invalid_argument("gauss_lobatto needs m >= 2");
  const int n = m - 1;
  QuadratureRule1D<Scalar> rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Scalar x = -std::cos(pi * i / n);
    Scalar pn{}, pn1{};
    if (i > 0) {
      for (int it = 0; it < 100; ++it) {
        detail::legendre_pair(n, x, pn, pn1);
        // Newton on (1 - x^2) P_n'(x) = n (P_{n-1} - x P_n).
        const Scalar dx = (x * pn - pn1) / (m * pn);
        x -= dx;
        if (std::abs(dx) <= std::numeric_limits<Scalar>::epsilon()) break;
      }
    }
    detail::legendre_pair(n, x, pn, pn1);
    const Scalar w = Scalar(2) / (n * m * pn * pn);
    rule.nodes[i] = x;
    rule.nodes[m - 1 - i] = -x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = Scalar(0);
  return rule;
}

/// Orthonormal Legendre polynomial sqrt(a + 1/2) P_a on [-1, 1] and its derivative.
template <typename Scalar = double>
void orthonormal_legendre(int max_degree, Scalar x, Scalar* values, Scalar* derivatives) {
  std::vector<Scalar> p(static_cast<std::size_t>(max_degree) + 2), dp(p.size());
  p[0] = Scalar(1);
  dp[0] = Scalar(0);
  if (max_degree >= 1) {
    p[1] = x;
    dp[1] = Scalar(1);
  }
  for (int a = 1; a < max_degree; ++a) {
    p[a + 1] = ((2 * a + 1) * x * p[a] - a * p[a - 1]) / Scalar(a + 1);
    dp[a + 1] = dp[a - 1] + (2 * a + 1) * p[a];
  }
  for (int a = 0; a <= max_degree; ++a) {
    const Scalar s = std::sqrt(a + Scalar(0.5));
    if (values) values[a] = s * p[a];
    if (derivatives) derivatives[a] = s * dp[a];
  }
}

}  // namespace fpl
