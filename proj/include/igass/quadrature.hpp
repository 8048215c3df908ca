#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "igass/errors.hpp"

namespace igass {

/// One-dimensional rule on [-1, 1].
template <typename Scalar>
struct QuadratureRule {
  std::vector<Scalar> points;
  std::vector<Scalar> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
/// Nodes are found by Newton iteration on P_n from Chebyshev-type initial guesses.
template <typename Scalar>
QuadratureRule<Scalar> gauss_legendre(int n) {
  if (n < 1 || n > 16) throw InvalidArgument("Gauss-Legendre rule size must be in [1, 16], got " + std::to_string(n));
  QuadratureRule<Scalar> rule;
  rule.points.assign(n, Scalar(0));
  rule.weights.assign(n, Scalar(0));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    using std::abs;
    using std::cos;
    Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp(0);
    for (int iter = 0; iter < 100; ++iter) {
      // three-term recurrence for P_n(x) and P_n'(x)
      Scalar p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar pk = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = pk;
      }
      dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    // final derivative at the converged root
    Scalar p0(1), p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar pk = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = pk;
    }
    dp = n == 1 ? Scalar(1) : Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = Scalar(0);
  return rule;
}

/// Flattened tensor rule on [-1, 1]^3; point q = i0 + n0 * (i1 + n1 * i2).
template <typename Scalar>
struct TensorRule {
  std::array<QuadratureRule<Scalar>, 3> factors;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 3> points;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

template <typename Scalar>
TensorRule<Scalar> tensor_rule(const QuadratureRule<Scalar>& r0, const QuadratureRule<Scalar>& r1,
                               const QuadratureRule<Scalar>& r2) {
  TensorRule<Scalar> t;
  t.factors = {r0, r1, r2};
  const int nq = r0.size() * r1.size() * r2.size();
  t.points.resize(nq, 3);
  t.weights.resize(nq);
  int q = 0;
  for (int k = 0; k < r2.size(); ++k)
    for (int j = 0; j < r1.size(); ++j)
      for (int i = 0; i < r0.size(); ++i, ++q) {
        t.points.row(q) << r0.points[i], r1.points[j], r2.points[k];
        t.weights[q] = r0.weights[i] * r1.weights[j] * r2.weights[k];
      }
  return t;
}

/// (p+1)-point Gauss rule in every direction, the rule all element integrals use.
template <typename Scalar>
TensorRule<Scalar> element_rule(const std::array<int, 3>& degrees) {
  return tensor_rule(gauss_legendre<Scalar>(degrees[0] + 1), gauss_legendre<Scalar>(degrees[1] + 1),
                     gauss_legendre<Scalar>(degrees[2] + 1));
}

}  // namespace igass
