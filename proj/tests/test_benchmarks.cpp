#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "igass/benchmarks.hpp"

using namespace igass;
using Vec3 = Vector3<double>;

namespace {

/// Worst relative violation of |g(x(xi))| over random parametric samples of the discretized patch.
template <typename Residual>
double quadric_error(const NurbsPatch3d<double>& patch, Residual g, int samples = 100) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec3 xi(u(rng), u(rng), u(rng));
    worst = std::max(worst, std::abs(g(eval_point(patch, xi), xi)));
  }
  return worst;
}

double radius_xy(const Vec3& x) { return std::hypot(x[0], x[1]); }
double radius_xz(const Vec3& x) { return std::hypot(x[0], x[2]); }

double error_to(double value, double reference) { return std::abs(value / reference - 1.0); }

}  // namespace

TEST_CASE("benchmark tags") {
  for (const char* tag : {"straight", "curved", "scordelis", "hemisphere", "cylinder"})
    CHECK(to_string(parse_benchmark(tag)) == tag);
  CHECK_THROWS_AS(parse_benchmark("roof"), InvalidArgument);
}

TEST_CASE("curved geometries satisfy their defining quadrics") {
  SUBCASE("curved beam: x^2 + y^2 = r(zeta)^2") {
    const auto c = curved_beam(10, 100.0);
    const auto p = discretize(c, 2).patch;
    const double R = kCurvedRadius, t = c.thickness;
    CHECK(quadric_error(p, [&](const Vec3& x, const Vec3& xi) {
            return radius_xy(x) / (R + t * (xi[2] - 0.5)) - 1.0;
          }) < 1e-10);
    // arc midpoint on the circle of radius R
    CHECK(std::abs(radius_xy(eval_point(p, Vec3(0.5, 0.5, 0.5))) - R) < 1e-12 * R);
  }
  SUBCASE("Scordelis-Lo roof: x^2 + z^2 = r(zeta)^2, 40 degree half angle") {
    const auto c = scordelis_lo(4);
    const auto p = discretize(c, 2).patch;
    CHECK(quadric_error(p, [&](const Vec3& x, const Vec3& xi) {
            return radius_xz(x) / (25.0 + 0.25 * (xi[2] - 0.5)) - 1.0;
          }) < 1e-10);
    const Vec3 edge = eval_point(p, Vec3(1, 0, 0.5));
    CHECK(std::atan2(edge[0], edge[2]) == doctest::Approx(40.0 * std::numbers::pi / 180.0).epsilon(1e-12));
  }
  SUBCASE("hemisphere: |x| = r(zeta), outer surface at R + t/2") {
    const auto c = pinched_hemisphere(4);
    const auto p = discretize(c, 2).patch;
    CHECK(quadric_error(p, [&](const Vec3& x, const Vec3& xi) {
            return x.norm() / (10.0 + 0.04 * (xi[2] - 0.5)) - 1.0;
          }) < 1e-10);
    CHECK(quadric_error(p, [&](const Vec3&, const Vec3& xi) {
            return eval_point(p, Vec3(xi[0], xi[1], 1.0)).norm() / 10.02 - 1.0;
          }) < 1e-10);
    // load points A and B on the equator, apex on the axis
    CHECK((eval_point(p, Vec3(0, 0, 0.5)) - Vec3(10, 0, 0)).norm() < 1e-12);
    CHECK((eval_point(p, Vec3(1, 0, 0.5)) - Vec3(0, 10, 0)).norm() < 1e-12);
    CHECK((eval_point(p, Vec3(0.3, 1, 0.5)) - Vec3(0, 0, 10)).norm() < 1e-12);
  }
  SUBCASE("pinched cylinder: x^2 + z^2 = r(zeta)^2") {
    const auto c = pinched_cylinder(4);
    const auto p = discretize(c, 3).patch;
    CHECK(quadric_error(p, [&](const Vec3& x, const Vec3& xi) {
            return radius_xz(x) / (300.0 + 3.0 * (xi[2] - 0.5)) - 1.0;
          }) < 1e-10);
  }
}

TEST_CASE("undistorted straight beam: control net collinear along the length") {
  const auto p = discretize(straight_beam(8, 100.0), 2).patch;
  for (int k = 0; k < p.num_control_points(); ++k) {
    const auto g = p.grid_index(k);
    const Vec3 first = p.control_points().row(p.index(0, g[1], g[2])).transpose();
    const Vec3 x = p.control_points().row(k).transpose();
    CHECK(std::abs(x[1] - first[1]) < 1e-14);
    CHECK(std::abs(x[2] - first[2]) < 1e-14);
  }
}

TEST_CASE("distorted straight beam: skew peaks at mid-span, end sections untouched") {
  const auto c = straight_beam(8, 100.0, 30.0);
  const auto p = discretize(c, 2).patch;
  const Vec3 root_low = eval_point(p, Vec3(0, 0, 0)), root_high = eval_point(p, Vec3(0, 1, 0));
  CHECK(std::abs(root_low[0] - root_high[0]) < 1e-12);
  const Vec3 tip_low = eval_point(p, Vec3(1, 0, 0)), tip_high = eval_point(p, Vec3(1, 1, 0));
  CHECK(std::abs(tip_low[0] - tip_high[0]) < 1e-12);
  // the element boundary at mid-span tilts by the full angle
  const Vec3 a = eval_point(p, Vec3(0.5, 0, 0)), b = eval_point(p, Vec3(0.5, 1, 0));
  CHECK(std::atan2(b[0] - a[0], b[1] - a[1]) == doctest::Approx(30.0 * std::numbers::pi / 180.0).epsilon(1e-12));
  CHECK_THROWS_AS(straight_beam(8, 100.0, 90.0), InvalidArgument);
  CHECK_THROWS_AS(discretize(scordelis_lo(2), 1), InvalidArgument);
}

TEST_CASE("straight beam: SS at L/t = 100 and STD locking at 1e3") {
  const auto ss = run(straight_beam(8, 100.0), Formulation::ProjectedCartesian, 2);
  CHECK(error_to(ss.normalized_deflection, 1.0) < 0.01);
  CHECK(ss.normalized_deflection == doctest::Approx(ss.raw_deflection / straight_beam(8, 100.0).reference));
  const auto std2 = run(straight_beam(8, 1000.0), Formulation::Standard, 2);
  CHECK(std2.normalized_deflection < 0.9);
}

TEST_CASE("curved beam: STD p=2 locks at R/t = 1e3") {
  CHECK(run(curved_beam(10, 1000.0), Formulation::Standard, 2).normalized_deflection < 0.5);
}

TEST_CASE("locking alleviation ordering at slenderness >= 1e3") {
  for (const double s : {1e3, 1e4}) {
    const auto straight = straight_beam(8, s);
    CHECK(error_to(run(straight, Formulation::ProjectedCartesian, 2).normalized_deflection, 1.0) <
          error_to(run(straight, Formulation::Standard, 2).normalized_deflection, 1.0));
    const auto curved = curved_beam(10, s);
    CHECK(error_to(run(curved, Formulation::ProjectedCartesian, 2).normalized_deflection, 1.0) <
          error_to(run(curved, Formulation::Standard, 2).normalized_deflection, 1.0));
  }
}

TEST_CASE("monotone convergence on the shell problems") {
  for (const auto kind : {BenchmarkKind::ScordelisLo, BenchmarkKind::PinchedHemisphere, BenchmarkKind::PinchedCylinder})
    for (const auto f : {Formulation::ProjectedCartesian, Formulation::ProjectedCurvilinear}) {
      CAPTURE(to_string(kind));
      CAPTURE(to_string(f));
      double previous = INFINITY;
      for (const int n : {4, 8, 16}) {
        const double err = error_to(run(make_case(kind, n, 0.0, 0.0), f, 2).normalized_deflection, 1.0);
        CHECK(err <= previous + 1e-3);
        previous = err;
      }
    }
}

TEST_CASE("repeated runs are bitwise identical") {
  const auto c = pinched_hemisphere(4);
  const auto a = run(c, Formulation::ProjectedCurvilinear, 2);
  const auto b = run(c, Formulation::ProjectedCurvilinear, 2);
  CHECK(a.raw_deflection == b.raw_deflection);
  CHECK(a.num_dofs == b.num_dofs);
}

TEST_CASE("solve quality: backward error near machine precision") {
  for (const auto& c : {scordelis_lo(4), pinched_cylinder(4), straight_beam(8, 1e4)}) {
    const auto r = run(c, Formulation::ProjectedCartesian, 2);
    CHECK(r.backward_error < 1e-10);
  }
}

TEST_CASE("zero load gives zero deflection") {
  auto c = pinched_cylinder(4);
  c.point_loads.clear();
  CHECK(run(c, Formulation::ProjectedCartesian, 2).raw_deflection == 0.0);
}

TEST_CASE("normalized deflection does not depend on the load magnitude") {
  auto c = curved_beam(4, 100.0);
  const double unit = run(c, Formulation::Standard, 2).normalized_deflection;
  c.edge_loads.front().magnitude = 7.5;
  c.reference *= 7.5;
  // linear in F up to rounding amplified by the condition number
  CHECK(run(c, Formulation::Standard, 2).normalized_deflection == doctest::Approx(unit).epsilon(1e-8));
}

TEST_CASE("precision override") {
  const auto c = straight_beam(4, 100.0);
  const auto d = run(c, Formulation::ProjectedCartesian, 2, RunOptions{Precision::Double});
  const auto e = run(c, Formulation::ProjectedCartesian, 2, RunOptions{Precision::Extended});
  CHECK(d.raw_deflection == doctest::Approx(e.raw_deflection).epsilon(1e-6));
}

TEST_CASE("C0 continuity option") {
  const auto c = curved_beam(10, 1e3);
  const auto smooth = discretize(c, 2).patch;
  const auto c0 = discretize(c, 2, Continuity::C0).patch;
  for (const double b : c0.knots(0).breakpoints())
    if (b > 0.0 && b < 1.0) CHECK(c0.knots(0).multiplicity(b) == 2);
  CHECK(c0.num_basis(0) == 21);
  CHECK(smooth.num_basis(0) == 12);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const Vec3 xi(u(rng), u(rng), u(rng));
    CHECK((eval_point(c0, xi) - eval_point(smooth, xi)).norm() < 1e-12);
  }
  // the same 10 elements, decoupled to C0, are free of membrane locking
  for (const auto f : {Formulation::ProjectedCartesian, Formulation::ProjectedCurvilinear}) {
    RunOptions options;
    options.continuity = Continuity::C0;
    CHECK(error_to(run(c, f, 2, options).normalized_deflection, 1.0) < 0.01);
  }
}

TEST_CASE("case construction errors") {
  CHECK_THROWS_AS(straight_beam(0, 100.0), InvalidArgument);
  CHECK_THROWS_AS(straight_beam(4, -1.0), InvalidArgument);
  CHECK_THROWS_AS(curved_beam(4, 0.25), InvalidArgument);
  CHECK_THROWS_AS(scordelis_lo(0), InvalidArgument);
  CHECK_THROWS_AS(pinched_hemisphere(0), InvalidArgument);
  CHECK_THROWS_AS(pinched_cylinder(0), InvalidArgument);
}
