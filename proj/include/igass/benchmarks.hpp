#pragma once

/** @file benchmarks.hpp
 *  @brief The five solid-shell test problems: two cantilever beams and the shell obstacle course.
 *
 *  Every case is stored as an exact coarse patch plus boundary data phrased in
 *  parametric terms (faces, edges, points), so the same case can be discretized
 *  at any degree and mesh density. The third parametric direction is always the
 *  thickness direction, discretized with a single element.
 */

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "igass/assembly.hpp"
#include "igass/elements.hpp"
#include "igass/splines.hpp"

namespace igass {

enum class BenchmarkKind { StraightBeam, CurvedBeam, ScordelisLo, PinchedHemisphere, PinchedCylinder };

std::string_view to_string(BenchmarkKind kind);
BenchmarkKind parse_benchmark(std::string_view tag);

/// Components of every control point on a patch face are prescribed to zero.
struct FaceConstraint {
  int dir;                         ///< parametric direction normal to the face
  int side;                        ///< 0 = lower end, 1 = upper end
  std::array<bool, 3> components;  ///< x, y, z
};

struct BodyLoad {
  Vector3<double> density;  ///< force per unit volume
};

struct EdgeLoad {
  PatchEdge edge;
  double magnitude;
  bool radial;                ///< direction (x, y, 0)/|.| about the z axis instead of `direction`
  Vector3<double> direction;  ///< fixed unit direction when not radial
};

struct PointLoad {
  Vector3<double> xi;
  Vector3<double> force;
};

struct BenchmarkCase {
  std::string name;
  BenchmarkKind kind;
  int n_elems = 0;             ///< elements per in-plane direction (beams: along the length)
  double slenderness = 0.0;    ///< L/t or R/t
  double distortion_deg = 0.0;
  double E = 0.0, nu = 0.0;
  double thickness = 0.0;

  NurbsPatch3d<double> coarse;  ///< exact geometry, one element per direction
  std::array<int, 3> elements{};
  /// In-plane mesh distortion. Applied to the refined mesh at the coarse degree, before
  /// degree elevation, so distorted meshes are C0 across element boundaries.
  std::function<Vector3<double>(const Vector3<double>&)> distort;

  std::vector<FaceConstraint> constraints;
  std::vector<BodyLoad> body_loads;
  std::vector<EdgeLoad> edge_loads;
  std::vector<PointLoad> point_loads;

  Vector3<double> measure_xi;
  Vector3<double> measure_direction;  ///< deflection = u(measure_xi) . measure_direction
  double reference = 0.0;             ///< normalized = raw / reference
  std::string reference_note;
};

/// A case turned into a concrete patch, constraint set and load vector.
struct Discretization {
  NurbsPatch3d<double> patch;
  DofMap dofs{0};
  VectorX<double> load;
};

enum class Precision { Double, Extended };

/// Inter-element continuity of the analysis mesh. Maximal = C^{p-1} at every interior
/// knot (refinement after elevation); C0 = interior knots raised to multiplicity p.
enum class Continuity { Maximal, C0 };

struct RunOptions {
  /// Extended = assemble and factorize in long double. Automatic when unset:
  /// extended for slenderness >= 1e3, where double rounding pollutes bending modes.
  std::optional<Precision> precision;
  Continuity continuity = Continuity::Maximal;
};

struct RunResult {
  std::string benchmark;
  Formulation formulation;
  int degree = 0;
  int n_elems = 0;
  double slenderness = 0.0;
  double distortion_deg = 0.0;
  int num_dofs = 0;
  double raw_deflection = 0.0;
  double normalized_deflection = 0.0;
  double wall_time_s = 0.0;
  double relative_residual = 0.0;  ///< |K U - F| / |F| on the free DOFs
  double backward_error = 0.0;     ///< |K U - F| / (|K| |U| + |F|) on the free DOFs
};

inline constexpr double kBeamLength = 100.0;
inline constexpr double kBeamWidth = 1.0;
inline constexpr double kBeamModulus = 1000.0;
inline constexpr double kCurvedRadius = 10.0;

inline constexpr double kScordelisReference = 0.3024;
inline constexpr double kHemisphereReference = 0.0924;
inline constexpr double kCylinderReference = 1.8248e-5;

/// Cantilever L=100, w=1, E=1000, nu=0; clamped at x=0, unit load on the top edge of the
/// free end, deflection at the bottom edge. Normalized by F L^3 / (3 E I).
BenchmarkCase straight_beam(int n_elems, double slenderness, double distortion_deg = 0.0);

/// Quarter ring R=10 (mid fiber), w=1, E=1000, nu=0; clamped at one end, unit radial load
/// on the exterior edge of the other, radial deflection at the interior edge.
/// Normalized by pi F R^3 / (4 E I).
BenchmarkCase curved_beam(int n_elems, double slenderness);

/// Quarter of the Scordelis-Lo roof (R=25, L=50, t=0.25, 40 deg half angle) under self weight.
BenchmarkCase scordelis_lo(int n_elems_per_side);

/// Quarter of the pinched hemisphere (R=10, t=0.04, no hole, apex fixed).
BenchmarkCase pinched_hemisphere(int n_elems_per_side);

/// Eighth of the pinched cylinder (R=300, L=600, t=3) with rigid end diaphragms.
BenchmarkCase pinched_cylinder(int n_elems_per_side);

/// Builds the case for a given benchmark kind; `slenderness` applies to the beams only.
BenchmarkCase make_case(BenchmarkKind kind, int n_elems, double slenderness, double distortion_deg);

/// Degree elevation of the coarse patch, uniform refinement, distortion, constraints and loads.
/// Distorted cases are C0 whatever `continuity` says.
Discretization discretize(const BenchmarkCase& c, int degree, Continuity continuity = Continuity::Maximal);

RunResult run(const BenchmarkCase& c, Formulation formulation, int degree, const RunOptions& options = {});

/// The control points lying on face (dir, side) of a patch.
std::vector<int> face_control_points(const NurbsPatch3d<double>& patch, int dir, int side);

}  // namespace igass
