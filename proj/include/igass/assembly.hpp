#pragma once

/** @file assembly.hpp
 *  @brief Global DOF numbering, load vectors, sparse assembly and the direct solve.
 *
 *  Global DOF of control point k, component c is 3 k + c.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "igass/elements.hpp"
#include "igass/errors.hpp"
#include "igass/projection.hpp"
#include "igass/quadrature.hpp"
#include "igass/splines.hpp"

namespace igass {

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;

/// Control-point/component to DOF map with a set of prescribed DOFs.
class DofMap {
 public:
  explicit DofMap(int num_control_points)
      : constrained_(3 * num_control_points, false), prescribed_(3 * num_control_points, 0.0) {}

  int num_dofs() const { return static_cast<int>(constrained_.size()); }
  int num_control_points() const { return num_dofs() / 3; }
  static int dof(int control_point, int component) { return 3 * control_point + component; }

  void constrain(int control_point, int component, double value = 0.0) {
    if (component < 0 || component > 2) throw InvalidArgument("component must be 0, 1 or 2");
    const int d = dof(control_point, component);
    if (d < 0 || d >= num_dofs()) throw InvalidArgument("control point index out of range");
    constrained_[d] = true;
    prescribed_[d] = value;
  }

  void constrain_all(int control_point) {
    for (int c = 0; c < 3; ++c) constrain(control_point, c);
  }

  bool is_constrained(int d) const { return constrained_[d]; }
  double prescribed(int d) const { return prescribed_[d]; }

  int num_constrained() const { return static_cast<int>(std::count(constrained_.begin(), constrained_.end(), true)); }
  int num_free() const { return num_dofs() - num_constrained(); }

  /// DOF -> index in the reduced system, -1 for constrained DOFs.
  std::vector<int> free_index() const {
    std::vector<int> idx(num_dofs(), -1);
    int next = 0;
    for (int d = 0; d < num_dofs(); ++d)
      if (!constrained_[d]) idx[d] = next++;
    return idx;
  }

 private:
  std::vector<bool> constrained_;
  std::vector<double> prescribed_;
};

template <typename Scalar>
struct LinearSystem {
  SparseMatrix<Scalar> K;
  VectorX<Scalar> F;
  VectorX<Scalar> U;
};

/// Element-by-element assembly of the global stiffness (all DOFs, constraints not applied).
/// Projected formulations use the cached operators for the patch degree.
template <typename Scalar>
SparseMatrix<Scalar> assemble_stiffness(const NurbsPatch3d<Scalar>& patch, Formulation formulation,
                                        const Matrix6<Scalar>& D) {
  const int n = 3 * patch.num_control_points();
  const auto rule = element_rule<Scalar>(patch.degrees());
  const ProjectionSet<Scalar>* proj = is_projected(formulation) ? &projection_set<Scalar>(patch.degree(0)) : nullptr;

  SparseMatrix<Scalar> K(n, n);
  std::vector<Eigen::Triplet<Scalar>> triplets;
  const std::size_t flush_at = std::size_t(1) << 22;
  auto flush = [&] {
    SparseMatrix<Scalar> part(n, n);
    part.setFromTriplets(triplets.begin(), triplets.end());
    K += part;
    triplets.clear();
  };

  const int ne0 = patch.knots(0).num_elements(), ne1 = patch.knots(1).num_elements(),
            ne2 = patch.knots(2).num_elements();
  for (int e2 = 0; e2 < ne2; ++e2)
    for (int e1 = 0; e1 < ne1; ++e1)
      for (int e0 = 0; e0 < ne0; ++e0) {
        const auto kin = element_kinematics(patch, {e0, e1, e2}, rule);
        const MatrixX<Scalar> ke = stiffness(formulation, kin, D, proj);
        const auto dofs = element_dofs(kin);
        for (int c = 0; c < ke.cols(); ++c)
          for (int r = 0; r < ke.rows(); ++r) triplets.emplace_back(dofs[r], dofs[c], ke(r, c));
        if (triplets.size() >= flush_at) flush();
      }
  flush();
  K.makeCompressed();
  return K;
}

/// F_k = int N_k f dOmega for a constant force density f.
template <typename Scalar>
VectorX<Scalar> body_load(const NurbsPatch3d<Scalar>& patch, const Vector3<Scalar>& f) {
  VectorX<Scalar> F = VectorX<Scalar>::Zero(3 * patch.num_control_points());
  if (f.isZero(Scalar(0))) return F;
  const auto rule = element_rule<Scalar>(patch.degrees());
  const int ne0 = patch.knots(0).num_elements(), ne1 = patch.knots(1).num_elements(),
            ne2 = patch.knots(2).num_elements();
  for (int e2 = 0; e2 < ne2; ++e2)
    for (int e1 = 0; e1 < ne1; ++e1)
      for (int e0 = 0; e0 < ne0; ++e0) {
        const auto kin = element_kinematics(patch, {e0, e1, e2}, rule);
        for (const auto& qp : kin.points)
          for (int a = 0; a < kin.num_functions(); ++a)
            F.template segment<3>(3 * kin.active[a]) += (qp.weight * qp.basis.values[a]) * f;
      }
  return F;
}

/// Volume of the patch by the element quadrature.
template <typename Scalar>
Scalar patch_volume(const NurbsPatch3d<Scalar>& patch) {
  const auto F = body_load(patch, Vector3<Scalar>(0, 0, 1));
  Scalar v(0);
  for (Eigen::Index i = 2; i < F.size(); i += 3) v += F[i];
  return v;
}

/// A boundary edge of the patch: runs along `along`; the other two directions (in
/// increasing order) sit at their lower (0) or upper (1) parametric end.
struct PatchEdge {
  int along = 0;
  std::array<int, 2> sides{};
};

/// Consistent line load of total magnitude `magnitude` spread uniformly per unit length
/// along `edge`; `direction(x)` gives the unit load direction at a point.
template <typename Scalar>
VectorX<Scalar> edge_load(const NurbsPatch3d<Scalar>& patch, const PatchEdge& edge, Scalar magnitude,
                          const std::function<Vector3<Scalar>(const Vector3<Scalar>&)>& direction) {
  if (edge.along < 0 || edge.along > 2 || edge.sides[0] < 0 || edge.sides[0] > 1 || edge.sides[1] < 0 ||
      edge.sides[1] > 1)
    throw InvalidArgument("invalid patch edge");
  VectorX<Scalar> F = VectorX<Scalar>::Zero(3 * patch.num_control_points());
  if (magnitude == Scalar(0)) return F;

  const int d = edge.along, o1 = (d == 0) ? 1 : 0, o2 = (d == 2) ? 1 : 2;
  Vector3<Scalar> xi;
  xi[o1] = edge.sides[0] == 0 ? patch.knots(o1).front() : patch.knots(o1).back();
  xi[o2] = edge.sides[1] == 0 ? patch.knots(o2).front() : patch.knots(o2).back();

  const auto rule = gauss_legendre<Scalar>(patch.degree(d) + 3);
  struct Sample {
    BasisEval<Scalar> basis;
    Vector3<Scalar> dir;
    Scalar dl;
  };
  std::vector<Sample> samples;
  Scalar length(0);
  const auto bp = patch.knots(d).breakpoints();
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const Scalar half = (bp[e + 1] - bp[e]) / Scalar(2);
    for (int q = 0; q < rule.size(); ++q) {
      xi[d] = bp[e] + half * (rule.points[q] + Scalar(1));
      BasisEval<Scalar> b = eval_basis(patch, xi);
      Vector3<Scalar> x = Vector3<Scalar>::Zero(), tangent = Vector3<Scalar>::Zero();
      for (std::size_t a = 0; a < b.active.size(); ++a) {
        const Vector3<Scalar> xk = patch.control_points().row(b.active[a]).transpose();
        x += b.values[a] * xk;
        tangent += b.grads_param(a, d) * xk;
      }
      const Scalar dl = tangent.norm() * half * rule.weights[q];
      length += dl;
      samples.push_back({std::move(b), direction(x), dl});
    }
  }
  const Scalar q_line = magnitude / length;
  for (const auto& s : samples)
    for (std::size_t a = 0; a < s.basis.active.size(); ++a)
      F.template segment<3>(3 * s.basis.active[a]) += (q_line * s.dl * s.basis.values[a]) * s.dir;
  return F;
}

/// Edge load with a fixed direction; `resultant` is the total force vector.
template <typename Scalar>
VectorX<Scalar> edge_load(const NurbsPatch3d<Scalar>& patch, const PatchEdge& edge, const Vector3<Scalar>& resultant) {
  const Scalar m = resultant.norm();
  if (m == Scalar(0)) return edge_load<Scalar>(patch, edge, Scalar(0), [](const Vector3<Scalar>& x) { return x; });
  const Vector3<Scalar> dir = resultant / m;
  return edge_load<Scalar>(patch, edge, m, [dir](const Vector3<Scalar>&) { return dir; });
}

/// Consistent point load F_k = N_k(xi) force.
template <typename Scalar>
VectorX<Scalar> point_load(const NurbsPatch3d<Scalar>& patch, const Vector3<Scalar>& xi, const Vector3<Scalar>& force) {
  if (!patch.contains(xi)) throw DomainError("load point outside the patch domain");
  VectorX<Scalar> F = VectorX<Scalar>::Zero(3 * patch.num_control_points());
  const BasisEval<Scalar> b = eval_basis(patch, xi);
  for (std::size_t a = 0; a < b.active.size(); ++a) F.template segment<3>(3 * b.active[a]) += b.values[a] * force;
  return F;
}

/// u(xi) = sum_k N_k(xi) u_k.
template <typename Scalar>
Vector3<Scalar> evaluate_displacement(const NurbsPatch3d<Scalar>& patch, const VectorX<Scalar>& U,
                                      const Vector3<Scalar>& xi) {
  if (!patch.contains(xi)) throw DomainError("evaluation point outside the patch domain");
  if (U.size() != 3 * patch.num_control_points()) throw InvalidArgument("displacement vector size mismatch");
  const BasisEval<Scalar> b = eval_basis(patch, xi);
  Vector3<Scalar> u = Vector3<Scalar>::Zero();
  for (std::size_t a = 0; a < b.active.size(); ++a) u += b.values[a] * U.template segment<3>(3 * b.active[a]);
  return u;
}

/// Reduced system after row/column elimination of the prescribed DOFs.
template <typename Scalar>
struct ReducedSystem {
  SparseMatrix<Scalar> K;
  VectorX<Scalar> F;
  std::vector<int> free_index;
};

template <typename Scalar>
ReducedSystem<Scalar> apply_constraints(const SparseMatrix<Scalar>& K, const VectorX<Scalar>& F, const DofMap& dofs) {
  if (K.rows() != dofs.num_dofs() || F.size() != dofs.num_dofs()) throw InvalidArgument("system size mismatch");
  ReducedSystem<Scalar> red;
  red.free_index = dofs.free_index();
  const int nf = dofs.num_free();
  red.F.resize(nf);
  for (int d = 0; d < dofs.num_dofs(); ++d)
    if (red.free_index[d] >= 0) red.F[red.free_index[d]] = F[d];
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(K.nonZeros());
  for (int c = 0; c < K.outerSize(); ++c)
    for (typename SparseMatrix<Scalar>::InnerIterator it(K, c); it; ++it) {
      const int rf = red.free_index[it.row()], cf = red.free_index[c];
      if (rf < 0) continue;
      if (cf >= 0)
        trip.emplace_back(rf, cf, it.value());
      else
        red.F[rf] -= it.value() * Scalar(dofs.prescribed(c));
    }
  red.K.resize(nf, nf);
  red.K.setFromTriplets(trip.begin(), trip.end());
  return red;
}

/// Sparse LDL^T solve of a symmetric positive definite system. Pivots below
/// 256 eps max|pivot| are counted as zero-energy modes and reported.
template <typename Scalar>
VectorX<Scalar> solve_spd(const SparseMatrix<Scalar>& K, const VectorX<Scalar>& F) {
  Eigen::SimplicialLDLT<SparseMatrix<Scalar>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SingularSystem(-1);
  using std::abs;
  const VectorX<Scalar> pivots = ldlt.vectorD();
  const Scalar tol = Scalar(256) * std::numeric_limits<Scalar>::epsilon() * pivots.cwiseAbs().maxCoeff();
  const int zero_modes = static_cast<int>((pivots.array() <= tol).count());
  if (zero_modes > 0) throw SingularSystem(zero_modes);
  VectorX<Scalar> U = ldlt.solve(F);
  // two steps of iterative refinement
  for (int it = 0; it < 2; ++it) U += ldlt.solve(F - K * U);
  return U;
}

/// Relative residual |K U - F| / |F| (zero when F = 0 and U solves exactly).
template <typename Scalar>
Scalar relative_residual(const SparseMatrix<Scalar>& K, const VectorX<Scalar>& U, const VectorX<Scalar>& F) {
  const Scalar nf = F.norm();
  const Scalar nr = (K * U - F).norm();
  return nf > Scalar(0) ? nr / nf : nr;
}

/// Normwise backward error |K U - F| / (|K|_F |U| + |F|). Unlike the relative residual it
/// stays near machine precision for a backward-stable solve however ill-conditioned K is.
template <typename Scalar>
Scalar backward_error(const SparseMatrix<Scalar>& K, const VectorX<Scalar>& U, const VectorX<Scalar>& F) {
  const Scalar nr = (K * U - F).norm();
  const Scalar scale = K.norm() * U.norm() + F.norm();
  return scale > Scalar(0) ? nr / scale : nr;
}

/// Solves K U = F on the free DOFs and scatters back with the prescribed values.
template <typename Scalar>
VectorX<Scalar> solve(const SparseMatrix<Scalar>& K, const VectorX<Scalar>& F, const DofMap& dofs) {
  const ReducedSystem<Scalar> red = apply_constraints(K, F, dofs);
  VectorX<Scalar> U(dofs.num_dofs());
  VectorX<Scalar> Uf = VectorX<Scalar>::Zero(red.F.size());
  if (red.F.size() > 0) Uf = solve_spd(red.K, red.F);
  for (int d = 0; d < dofs.num_dofs(); ++d)
    U[d] = red.free_index[d] >= 0 ? Uf[red.free_index[d]] : Scalar(dofs.prescribed(d));
  return U;
}

/// Convenience: assemble, load and solve in one go.
template <typename Scalar>
LinearSystem<Scalar> assemble_and_solve(const NurbsPatch3d<Scalar>& patch, Formulation formulation,
                                        const Matrix6<Scalar>& D, VectorX<Scalar> F, const DofMap& dofs) {
  LinearSystem<Scalar> sys;
  sys.K = assemble_stiffness(patch, formulation, D);
  sys.F = std::move(F);
  sys.U = solve(sys.K, sys.F, dofs);
  return sys;
}

}  // namespace igass
