#include "igass/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace igass {

namespace {

using Vec3 = Vector3<double>;

constexpr double kSqrtHalf = std::numbers::sqrt2 / 2.0;

/// Control points and weights of a single-segment rational quadratic circular arc of
/// unit radius from angle 0 to `sweep` (< 180 deg), as (cos, sin) pairs.
struct Arc {
  std::array<std::array<double, 2>, 3> points;
  std::array<double, 3> weights;
};

Arc unit_arc(double sweep) {
  const double half = sweep / 2.0;
  const double r_mid = 1.0 / std::cos(half);
  return {{{{1.0, 0.0}, {r_mid * std::cos(half), r_mid * std::sin(half)}, {std::cos(sweep), std::sin(sweep)}}},
          {1.0, std::cos(half), 1.0}};
}

std::array<KnotVector<double>, 3> single_element_knots(int degree) {
  return {KnotVector<double>::uniform(degree, 1), KnotVector<double>::uniform(degree, 1),
          KnotVector<double>::uniform(degree, 1)};
}

/// Three thickness layers at r = R - t/2, R, R + t/2 (quadratic, one element).
std::array<double, 3> layers(double mid, double t) { return {mid - t / 2.0, mid, mid + t / 2.0}; }

/// Cylindrical panel: angle theta from the crown (x = r sin, z = r cos), axial y in [0, length].
NurbsPatch3d<double> cylindrical_panel(double radius, double thickness, double sweep, double length) {
  const Arc arc = unit_arc(sweep);
  const auto r = layers(radius, thickness);
  MatrixX3<double> cp(27, 3);
  VectorX<double> w(27);
  int idx = 0;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i, ++idx) {
        // arc parameter measured from the crown: (cos, sin) -> (z, x)
        cp.row(idx) << r[k] * arc.points[i][1], length * j / 2.0, r[k] * arc.points[i][0];
        w[idx] = arc.weights[i];
      }
  return NurbsPatch3d<double>(single_element_knots(2), cp, w);
}

}  // namespace

std::string_view to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::StraightBeam: return "straight";
    case BenchmarkKind::CurvedBeam: return "curved";
    case BenchmarkKind::ScordelisLo: return "scordelis";
    case BenchmarkKind::PinchedHemisphere: return "hemisphere";
    case BenchmarkKind::PinchedCylinder: return "cylinder";
  }
  return "?";
}

BenchmarkKind parse_benchmark(std::string_view tag) {
  for (const auto k : {BenchmarkKind::StraightBeam, BenchmarkKind::CurvedBeam, BenchmarkKind::ScordelisLo,
                       BenchmarkKind::PinchedHemisphere, BenchmarkKind::PinchedCylinder})
    if (to_string(k) == tag) return k;
  throw InvalidArgument("unknown benchmark '" + std::string(tag) +
                        "' (expected straight, curved, scordelis, hemisphere or cylinder)");
}

BenchmarkCase straight_beam(int n_elems, double slenderness, double distortion_deg) {
  if (n_elems < 1) throw InvalidArgument("straight beam needs at least one element");
  if (!(slenderness > 0.0)) throw InvalidArgument("slenderness must be positive");
  if (!(distortion_deg >= 0.0 && distortion_deg < 90.0)) throw InvalidArgument("distortion angle must be in [0, 90)");
  const double L = kBeamLength, w = kBeamWidth, t = L / slenderness;

  BenchmarkCase c;
  c.name = "straight";
  c.kind = BenchmarkKind::StraightBeam;
  c.n_elems = n_elems;
  c.slenderness = slenderness;
  c.distortion_deg = distortion_deg;
  c.E = kBeamModulus;
  c.nu = 0.0;
  c.thickness = t;

  MatrixX3<double> cp(8, 3);
  cp << 0, 0, 0, L, 0, 0, 0, w, 0, L, w, 0, 0, 0, t, L, 0, t, 0, w, t, L, w, t;
  c.coarse = NurbsPatch3d<double>(single_element_knots(1), cp);
  c.elements = {n_elems, 1, 1};
  if (distortion_deg > 0.0) {
    const double theta_max = distortion_deg * std::numbers::pi / 180.0;
    // grid lines across the width tilt by theta(x), peaking at mid-span and vanishing at both ends
    c.distort = [=](const Vec3& x) {
      const double theta = theta_max * (1.0 - std::abs(2.0 * x[0] / L - 1.0));
      return Vec3(x[0] + (x[1] - w / 2.0) * std::tan(theta), x[1], x[2]);
    };
  }

  c.constraints.push_back({0, 0, {true, true, true}});
  c.edge_loads.push_back({PatchEdge{1, {1, 1}}, 1.0, false, Vec3(0, 0, -1)});
  c.measure_xi = Vec3(1.0, 0.5, 0.0);
  c.measure_direction = Vec3(0, 0, -1);
  const double I = w * t * t * t / 12.0;
  c.reference = L * L * L / (3.0 * c.E * I);
  c.reference_note = "F L^3 / (3 E I)";
  return c;
}

BenchmarkCase curved_beam(int n_elems, double slenderness) {
  if (n_elems < 1) throw InvalidArgument("curved beam needs at least one element");
  if (!(slenderness > 0.5)) throw InvalidArgument("slenderness R/t must exceed 0.5");
  const double R = kCurvedRadius, w = kBeamWidth, t = R / slenderness;

  BenchmarkCase c;
  c.name = "curved";
  c.kind = BenchmarkKind::CurvedBeam;
  c.n_elems = n_elems;
  c.slenderness = slenderness;
  c.E = kBeamModulus;
  c.nu = 0.0;
  c.thickness = t;

  const Arc arc = unit_arc(std::numbers::pi / 2.0);
  const auto r = layers(R, t);
  MatrixX3<double> cp(27, 3);
  VectorX<double> wt(27);
  int idx = 0;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i, ++idx) {
        cp.row(idx) << r[k] * arc.points[i][0], r[k] * arc.points[i][1], w * j / 2.0;
        wt[idx] = arc.weights[i];
      }
  c.coarse = NurbsPatch3d<double>(single_element_knots(2), cp, wt);
  c.elements = {n_elems, 1, 1};

  c.constraints.push_back({0, 0, {true, true, true}});
  c.edge_loads.push_back({PatchEdge{1, {1, 1}}, 1.0, true, Vec3::Zero()});
  c.measure_xi = Vec3(1.0, 0.5, 0.0);
  c.measure_direction = Vec3(0, 1, 0);  // radial at the free end (theta = 90 deg)
  const double I = w * t * t * t / 12.0;
  c.reference = std::numbers::pi * R * R * R / (4.0 * c.E * I);
  c.reference_note = "pi F R^3 / (4 E I)";
  return c;
}

BenchmarkCase scordelis_lo(int n) {
  if (n < 1) throw InvalidArgument("Scordelis-Lo roof needs at least one element per side");
  const double R = 25.0, L = 50.0, t = 0.25;
  BenchmarkCase c;
  c.name = "scordelis";
  c.kind = BenchmarkKind::ScordelisLo;
  c.n_elems = n;
  c.slenderness = R / t;
  c.E = 4.32e8;
  c.nu = 0.0;
  c.thickness = t;
  c.coarse = cylindrical_panel(R, t, 40.0 * std::numbers::pi / 180.0, L / 2.0);
  c.elements = {n, n, 1};
  c.constraints = {
      {0, 0, {true, false, false}},  // crown line: symmetry plane x = 0
      {1, 0, {false, true, false}},  // mid-span: symmetry plane y = 0
      {1, 1, {true, false, true}},   // rigid diaphragm
  };
  c.body_loads.push_back({Vec3(0, 0, -360.0)});
  c.measure_xi = Vec3(1.0, 0.0, 0.5);  // free edge at mid-span, mid-surface
  c.measure_direction = Vec3(0, 0, -1);
  c.reference = kScordelisReference;
  c.reference_note = "0.3024";
  return c;
}

BenchmarkCase pinched_hemisphere(int n) {
  if (n < 1) throw InvalidArgument("hemisphere needs at least one element per side");
  const double R = 10.0, t = 0.04, F = 1.0;
  BenchmarkCase c;
  c.name = "hemisphere";
  c.kind = BenchmarkKind::PinchedHemisphere;
  c.n_elems = n;
  c.slenderness = R / t;
  c.E = 6.825e7;
  c.nu = 0.3;
  c.thickness = t;

  // surface of revolution: azimuth arc (xi) times meridian arc (eta) from equator to apex
  const Arc arc = unit_arc(std::numbers::pi / 2.0);
  const auto r = layers(R, t);
  MatrixX3<double> cp(27, 3);
  VectorX<double> w(27);
  int idx = 0;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i, ++idx) {
        const double rho = arc.points[j][0], z = arc.points[j][1];
        cp.row(idx) << r[k] * rho * arc.points[i][0], r[k] * rho * arc.points[i][1], r[k] * z;
        w[idx] = arc.weights[i] * arc.weights[j];
      }
  c.coarse = NurbsPatch3d<double>(single_element_knots(2), cp, w);
  c.elements = {n, n, 1};
  c.constraints = {
      {0, 0, {false, true, false}},  // symmetry plane y = 0
      {0, 1, {true, false, false}},  // symmetry plane x = 0
      {1, 1, {true, true, true}},    // apex
  };
  // the quarter model carries the full force F at each of its two load points
  c.point_loads.push_back({Vec3(0.0, 0.0, 0.5), Vec3(F, 0, 0)});
  c.point_loads.push_back({Vec3(1.0, 0.0, 0.5), Vec3(0, -F, 0)});
  c.measure_xi = Vec3(0.0, 0.0, 0.5);
  c.measure_direction = Vec3(1, 0, 0);
  c.reference = kHemisphereReference;
  c.reference_note = "0.0924";
  return c;
}

BenchmarkCase pinched_cylinder(int n) {
  if (n < 1) throw InvalidArgument("pinched cylinder needs at least one element per side");
  const double R = 300.0, L = 600.0, t = 3.0, F = 1.0;
  BenchmarkCase c;
  c.name = "cylinder";
  c.kind = BenchmarkKind::PinchedCylinder;
  c.n_elems = n;
  c.slenderness = R / t;
  c.E = 3.0e6;
  c.nu = 0.3;
  c.thickness = t;
  c.coarse = cylindrical_panel(R, t, std::numbers::pi / 2.0, L / 2.0);
  c.elements = {n, n, 1};
  c.constraints = {
      {0, 0, {true, false, false}},  // symmetry plane x = 0
      {0, 1, {false, false, true}},  // symmetry plane z = 0
      {1, 0, {false, true, false}},  // symmetry plane y = 0
      {1, 1, {true, false, true}},   // rigid diaphragm
  };
  c.point_loads.push_back({Vec3(0.0, 0.0, 0.5), Vec3(0, 0, -F / 4.0)});
  c.measure_xi = Vec3(0.0, 0.0, 0.5);
  c.measure_direction = Vec3(0, 0, -1);
  c.reference = kCylinderReference;
  c.reference_note = "1.8248e-5";
  return c;
}

BenchmarkCase make_case(BenchmarkKind kind, int n_elems, double slenderness, double distortion_deg) {
  switch (kind) {
    case BenchmarkKind::StraightBeam: return straight_beam(n_elems, slenderness, distortion_deg);
    case BenchmarkKind::CurvedBeam: return curved_beam(n_elems, slenderness);
    case BenchmarkKind::ScordelisLo: return scordelis_lo(n_elems);
    case BenchmarkKind::PinchedHemisphere: return pinched_hemisphere(n_elems);
    case BenchmarkKind::PinchedCylinder: return pinched_cylinder(n_elems);
  }
  throw InvalidArgument("unknown benchmark");
}

std::vector<int> face_control_points(const NurbsPatch3d<double>& patch, int dir, int side) {
  std::vector<int> out;
  const int fixed = side == 0 ? 0 : patch.num_basis(dir) - 1;
  for (int k = 0; k < patch.num_control_points(); ++k)
    if (patch.grid_index(k)[dir] == fixed) out.push_back(k);
  return out;
}

Discretization discretize(const BenchmarkCase& c, int degree, Continuity continuity) {
  NurbsPatch3d<double> patch = c.coarse;
  for (int d = 0; d < 3; ++d)
    if (degree < patch.degree(d))
      throw InvalidArgument("degree " + std::to_string(degree) + " below the exact-geometry degree of " + c.name);
  if (c.distort) {
    // distort the mesh at the coarse degree so element edges stay the drawn straight lines,
    // then elevate; the elevated space is C0 across element boundaries
    for (int d = 0; d < 3; ++d) patch = refine_uniform(patch, d, c.elements[d]);
    for (int k = 0; k < patch.num_control_points(); ++k)
      patch.control_points().row(k) = c.distort(patch.control_points().row(k).transpose()).transpose();
    for (int d = 0; d < 3; ++d)
      while (patch.degree(d) < degree) patch = elevate_degree(patch, d);
  } else {
    for (int d = 0; d < 3; ++d) {
      while (patch.degree(d) < degree) patch = elevate_degree(patch, d);
      patch = refine_uniform(patch, d, c.elements[d]);
    }
  }
  if (continuity == Continuity::C0)
    for (int d = 0; d < 3; ++d) {
      std::vector<double> repeat;
      const auto& kv = patch.knots(d);
      for (const double b : kv.breakpoints())
        if (b > kv.front() && b < kv.back())
          for (int m = kv.multiplicity(b); m < patch.degree(d); ++m) repeat.push_back(b);
      if (!repeat.empty()) patch = insert_knots(patch, d, std::move(repeat));
    }

  Discretization out{patch, DofMap(patch.num_control_points()), VectorX<double>::Zero(3 * patch.num_control_points())};
  for (const auto& fc : c.constraints)
    for (const int k : face_control_points(patch, fc.dir, fc.side))
      for (int comp = 0; comp < 3; ++comp)
        if (fc.components[comp]) out.dofs.constrain(k, comp);
  for (const auto& bl : c.body_loads) out.load += body_load(patch, bl.density);
  for (const auto& el : c.edge_loads) {
    if (el.radial)
      out.load += edge_load<double>(patch, el.edge, el.magnitude, [](const Vec3& x) {
        return Vec3(x[0], x[1], 0.0).normalized();
      });
    else
      out.load += edge_load<double>(patch, el.edge, el.magnitude * el.direction);
  }
  for (const auto& pl : c.point_loads) out.load += point_load(patch, pl.xi, pl.force);
  return out;
}

namespace {

template <typename Scalar>
NurbsPatch3d<Scalar> cast_patch(const NurbsPatch3d<double>& p) {
  std::array<KnotVector<Scalar>, 3> kv;
  for (int d = 0; d < 3; ++d) {
    const auto& k = p.knots(d).knots();
    kv[d] = KnotVector<Scalar>(p.degree(d), std::vector<Scalar>(k.begin(), k.end()));
  }
  return NurbsPatch3d<Scalar>(kv, p.control_points().cast<Scalar>(), p.weights().cast<Scalar>());
}

struct CaseSolution {
  double deflection;
  double relative_residual;
  double backward_error;
};

template <typename Scalar>
CaseSolution solve_case(const BenchmarkCase& c, const Discretization& disc, Formulation f) {
  const auto patch = cast_patch<Scalar>(disc.patch);
  const auto material = material_matrix<Scalar>(Scalar(c.E), Scalar(c.nu));
  const SparseMatrix<Scalar> K = assemble_stiffness(patch, f, material.D);
  const VectorX<Scalar> F = disc.load.cast<Scalar>();
  const VectorX<Scalar> U = solve(K, F, disc.dofs);
  const auto red = apply_constraints(K, F, disc.dofs);
  VectorX<Scalar> Uf(red.F.size());
  for (int d = 0; d < disc.dofs.num_dofs(); ++d)
    if (red.free_index[d] >= 0) Uf[red.free_index[d]] = U[d];
  const Vector3<Scalar> u = evaluate_displacement(patch, U, Vector3<Scalar>(c.measure_xi.cast<Scalar>()));
  return {static_cast<double>(u.dot(c.measure_direction.cast<Scalar>())),
          static_cast<double>(relative_residual(red.K, Uf, red.F)), static_cast<double>(backward_error(red.K, Uf, red.F))};
}

}  // namespace

RunResult run(const BenchmarkCase& c, Formulation formulation, int degree, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Discretization disc = discretize(c, degree, options.continuity);
  const Precision precision =
      options.precision.value_or(c.slenderness >= 1e3 ? Precision::Extended : Precision::Double);
  const CaseSolution sol = precision == Precision::Extended
                                   ? solve_case<long double>(c, disc, formulation)
                                   : solve_case<double>(c, disc, formulation);
  const auto stop = std::chrono::steady_clock::now();

  RunResult r;
  r.benchmark = c.name;
  r.formulation = formulation;
  r.degree = degree;
  r.n_elems = c.n_elems;
  r.slenderness = c.slenderness;
  r.distortion_deg = c.distortion_deg;
  r.num_dofs = disc.dofs.num_free();
  r.raw_deflection = sol.deflection;
  r.normalized_deflection = sol.deflection / c.reference;
  r.wall_time_s = std::chrono::duration<double>(stop - start).count();
  r.relative_residual = sol.relative_residual;
  r.backward_error = sol.backward_error;
  return r;
}

}  // namespace igass
