#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "igass/quadrature.hpp"

using namespace igass;

namespace {

/// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the Legendre recurrence,
/// weights 2 v_0^2 from the normalized eigenvectors.
std::pair<Eigen::VectorXd, Eigen::VectorXd> golub_welsch(int n) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) T(k, k - 1) = T(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
  Eigen::VectorXd w = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
  return {eig.eigenvalues(), w};
}

}  // namespace

TEST_CASE("Gauss-Legendre closed forms") {
  auto r = gauss_legendre<double>(1);
  CHECK(r.points[0] == 0.0);
  CHECK(r.weights[0] == doctest::Approx(2.0));

  r = gauss_legendre<double>(2);
  CHECK(r.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(1.0).epsilon(1e-15));

  r = gauss_legendre<double>(3);
  CHECK(r.points[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
  CHECK(r.points[1] == 0.0);
  CHECK(r.points[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(r.weights[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre agrees with the Golub-Welsch eigenvalue oracle") {
  for (int n = 1; n <= 16; ++n) {
    CAPTURE(n);
    const auto r = gauss_legendre<double>(n);
    const auto [x, w] = golub_welsch(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(r.points[i] - x[i]) < 1e-13);
      CHECK(std::abs(r.weights[i] - w[i]) < 1e-13);
      CHECK(r.weights[i] > 0.0);
      CHECK(r.points[i] == -r.points[n - 1 - i]);
      wsum += r.weights[i];
    }
    CHECK(std::abs(wsum - 2.0) < 1e-14);
  }
}

TEST_CASE("Gauss-Legendre exactness degree 2n-1") {
  for (int n = 1; n <= 16; ++n) {
    const auto r = gauss_legendre<double>(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.points[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(q - exact) < 1e-12);
    }
    // degree 2n is not integrated exactly
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.points[i], 2 * n);
    CHECK(std::abs(q - 2.0 / (2 * n + 1)) > 1e-12);
  }
}

TEST_CASE("Gauss-Legendre range") {
  CHECK_THROWS_AS(gauss_legendre<double>(0), InvalidArgument);
  CHECK_THROWS_AS(gauss_legendre<double>(17), InvalidArgument);
}

TEST_CASE("Gauss-Legendre in extended precision") {
  const auto r = gauss_legendre<long double>(3);
  CHECK(std::abs(r.points[2] - std::sqrt(0.6L)) < 1e-18L);
  CHECK(std::abs(r.weights[1] - 8.0L / 9.0L) < 1e-18L);
}

TEST_CASE("tensor rule: lexicographic order, first direction fastest") {
  const auto one = gauss_legendre<double>(1);
  auto t = tensor_rule(one, one, one);
  CHECK(t.size() == 1);
  CHECK(t.points.row(0).norm() == 0.0);
  CHECK(t.weights[0] == doctest::Approx(8.0));

  const auto two = gauss_legendre<double>(2);
  t = tensor_rule(two, two, two);
  const double a = 1.0 / std::sqrt(3.0);
  CHECK(t.size() == 8);
  CHECK((t.points.row(0) - Eigen::RowVector3d(-a, -a, -a)).norm() < 1e-15);
  CHECK((t.points.row(1) - Eigen::RowVector3d(a, -a, -a)).norm() < 1e-15);
  CHECK((t.points.row(2) - Eigen::RowVector3d(-a, a, -a)).norm() < 1e-15);
  CHECK((t.points.row(4) - Eigen::RowVector3d(-a, -a, a)).norm() < 1e-15);
  CHECK(t.weights.sum() == doctest::Approx(8.0).epsilon(1e-15));

  const auto three = gauss_legendre<double>(3), four = gauss_legendre<double>(4);
  t = tensor_rule(two, three, four);
  CHECK(t.size() == 24);
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 2; ++i) {
        const int q = i + 2 * (j + 3 * k);
        CHECK(t.points(q, 0) == two.points[i]);
        CHECK(t.points(q, 1) == three.points[j]);
        CHECK(t.points(q, 2) == four.points[k]);
        CHECK(t.weights[q] == two.weights[i] * three.weights[j] * four.weights[k]);
      }
}

TEST_CASE("tensor rule integrates random tensor polynomials exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto t = element_rule<double>({2, 3, 1});  // 3 x 4 x 2 points
  CHECK(t.size() == 24);
  for (int trial = 0; trial < 10; ++trial) {
    double c[6][8][4];
    double exact = 0.0;
    for (int a = 0; a <= 5; ++a)
      for (int b = 0; b <= 7; ++b)
        for (int d = 0; d <= 3; ++d) {
          c[a][b][d] = u(rng);
          const auto m = [](int k) { return k % 2 ? 0.0 : 2.0 / (k + 1); };
          exact += c[a][b][d] * m(a) * m(b) * m(d);
        }
    double q = 0.0;
    for (int i = 0; i < t.size(); ++i) {
      double f = 0.0;
      for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 7; ++b)
          for (int d = 0; d <= 3; ++d)
            f += c[a][b][d] * std::pow(t.points(i, 0), a) * std::pow(t.points(i, 1), b) * std::pow(t.points(i, 2), d);
      q += t.weights[i] * f;
    }
    CHECK(std::abs(q - exact) < 1e-12);
  }
}
