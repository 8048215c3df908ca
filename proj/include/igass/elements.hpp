#pragma once

/** @file elements.hpp
 *  @brief Element kinematics, isotropic material and the four stiffness formulations.
 *
 *  Voigt order throughout is (xx, yy, zz, xy, xz, yz) with engineering shear.
 *  Element DOFs are ordered (function a, component c) -> 3 a + c, functions in the
 *  lexicographic order of the active control points.
 */

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "igass/errors.hpp"
#include "igass/projection.hpp"
#include "igass/quadrature.hpp"
#include "igass/splines.hpp"

namespace igass {

template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar>
using Matrix6X = Eigen::Matrix<Scalar, 6, Eigen::Dynamic>;

enum class Formulation {
  Standard,              ///< STD: Cartesian B, Cartesian D
  Curvilinear,           ///< CURV: covariant B-tilde, D-tilde = R^{-T} D R^{-1}
  ProjectedCurvilinear,  ///< SS_ANS: covariant rows projected onto per-component reduced spaces
  ProjectedCartesian,    ///< SS: Cartesian derivatives projected onto Q_{p-1,p-1,p}
};

inline constexpr std::array<Formulation, 4> kAllFormulations = {
    Formulation::Standard, Formulation::Curvilinear, Formulation::ProjectedCurvilinear,
    Formulation::ProjectedCartesian};

inline std::string_view to_string(Formulation f) {
  switch (f) {
    case Formulation::Standard: return "std";
    case Formulation::Curvilinear: return "curv";
    case Formulation::ProjectedCurvilinear: return "ss_ans";
    case Formulation::ProjectedCartesian: return "ss";
  }
  return "?";
}

inline Formulation parse_formulation(std::string_view tag) {
  for (const Formulation f : kAllFormulations)
    if (to_string(f) == tag) return f;
  throw InvalidArgument("unknown formulation '" + std::string(tag) + "' (expected std, curv, ss_ans or ss)");
}

inline bool is_projected(Formulation f) {
  return f == Formulation::ProjectedCurvilinear || f == Formulation::ProjectedCartesian;
}

template <typename Scalar>
struct ElasticityMatrix {
  Scalar youngs_modulus;
  Scalar poisson_ratio;
  Matrix6<Scalar> D;
};

/// Isotropic Hooke law through the Lame constants.
template <typename Scalar>
ElasticityMatrix<Scalar> material_matrix(Scalar E, Scalar nu) {
  if (!(E > Scalar(0))) throw InvalidArgument("Young's modulus must be positive");
  if (!(nu > Scalar(-1) && nu < Scalar(0.5))) throw InvalidArgument("Poisson ratio must lie in (-1, 0.5)");
  const Scalar lambda = E * nu / ((Scalar(1) + nu) * (Scalar(1) - Scalar(2) * nu));
  const Scalar mu = E / (Scalar(2) * (Scalar(1) + nu));
  ElasticityMatrix<Scalar> m{E, nu, Matrix6<Scalar>::Zero()};
  m.D.template topLeftCorner<3, 3>().setConstant(lambda);
  m.D.template topLeftCorner<3, 3>().diagonal().array() += Scalar(2) * mu;
  m.D.template bottomRightCorner<3, 3>().diagonal().setConstant(mu);
  return m;
}

template <typename Scalar>
struct QuadraturePoint {
  BasisEval<Scalar> basis;
  Vector3<Scalar> x;
  Matrix3<Scalar> jacobian;
  Scalar det_j;
  Scalar weight;  ///< Gauss weight * det J * reference-to-parametric scaling
};

template <typename Scalar>
struct ElementKinematics {
  std::array<int, 3> element{};  ///< element index per parametric direction
  std::array<int, 3> degrees{};
  std::vector<int> active;       ///< global control-point indices, n_e of them
  std::vector<QuadraturePoint<Scalar>> points;

  int num_functions() const { return static_cast<int>(active.size()); }
  int num_dofs() const { return 3 * num_functions(); }
  int num_points() const { return static_cast<int>(points.size()); }
};

/// Knot-span bounds [a, b] of element `e` along `dir`.
template <typename Scalar>
std::pair<Scalar, Scalar> element_bounds(const NurbsPatch3d<Scalar>& patch, int dir, int e) {
  const auto spans = patch.knots(dir).element_spans();
  if (e < 0 || e >= static_cast<int>(spans.size())) throw DomainError("element index out of range");
  return {patch.knots(dir)[spans[e]], patch.knots(dir)[spans[e] + 1]};
}

/// Evaluates basis, geometry and integration weights at every point of `rule` mapped into
/// element `elem`. Throws SingularGeometry if det J <= 0 anywhere.
template <typename Scalar>
ElementKinematics<Scalar> element_kinematics(const NurbsPatch3d<Scalar>& patch, const std::array<int, 3>& elem,
                                             const TensorRule<Scalar>& rule) {
  ElementKinematics<Scalar> kin;
  kin.element = elem;
  kin.degrees = patch.degrees();
  std::array<int, 3> spans{};
  std::array<Scalar, 3> lo{}, half{};
  for (int d = 0; d < 3; ++d) {
    const auto all = patch.knots(d).element_spans();
    if (elem[d] < 0 || elem[d] >= static_cast<int>(all.size())) throw DomainError("element index out of range");
    spans[d] = all[elem[d]];
    lo[d] = patch.knots(d)[spans[d]];
    half[d] = (patch.knots(d)[spans[d] + 1] - lo[d]) / Scalar(2);
  }
  const Scalar scale = half[0] * half[1] * half[2];
  kin.points.reserve(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    Vector3<Scalar> xi;
    for (int d = 0; d < 3; ++d) xi[d] = lo[d] + half[d] * (rule.points(q, d) + Scalar(1));
    NurbsPointEval<Scalar> ev;
    const std::string where = "element (" + std::to_string(elem[0]) + "," + std::to_string(elem[1]) + "," +
                              std::to_string(elem[2]) + "), point " + std::to_string(q);
    try {
      ev = attach_geometry(patch, eval_basis(patch, xi, spans));
    } catch (const SingularGeometry& e) {
      throw SingularGeometry(e.det_j(), where);
    }
    if (!(ev.det_j > Scalar(0))) throw SingularGeometry(static_cast<double>(ev.det_j), where + " (inverted)");
    if (q == 0) kin.active = ev.basis.active;
    kin.points.push_back({std::move(ev.basis), ev.x, ev.jacobian, ev.det_j, rule.weights[q] * ev.det_j * scale});
  }
  return kin;
}

template <typename Scalar>
ElementKinematics<Scalar> element_kinematics(const NurbsPatch3d<Scalar>& patch, const std::array<int, 3>& elem) {
  return element_kinematics(patch, elem, element_rule<Scalar>(patch.degrees()));
}

/// Global DOF ids of the element DOFs.
template <typename Scalar>
std::vector<int> element_dofs(const ElementKinematics<Scalar>& kin) {
  std::vector<int> dofs(kin.num_dofs());
  for (int a = 0; a < kin.num_functions(); ++a)
    for (int c = 0; c < 3; ++c) dofs[3 * a + c] = 3 * kin.active[a] + c;
  return dofs;
}

/// Strain-displacement matrix from Cartesian gradients (one row per function).
template <typename Scalar>
Matrix6X<Scalar> b_from_gradients(const MatrixX3<Scalar>& grads) {
  const Eigen::Index ne = grads.rows();
  Matrix6X<Scalar> B = Matrix6X<Scalar>::Zero(6, 3 * ne);
  for (Eigen::Index k = 0; k < ne; ++k) {
    const Scalar nx = grads(k, 0), ny = grads(k, 1), nz = grads(k, 2);
    B(0, 3 * k) = nx;
    B(1, 3 * k + 1) = ny;
    B(2, 3 * k + 2) = nz;
    B(3, 3 * k) = ny;
    B(3, 3 * k + 1) = nx;
    B(4, 3 * k) = nz;
    B(4, 3 * k + 2) = nx;
    B(5, 3 * k + 1) = nz;
    B(5, 3 * k + 2) = ny;
  }
  return B;
}

/// Covariant strain-displacement matrix from parametric gradients and g_i = columns of J.
template <typename Scalar>
Matrix6X<Scalar> b_covariant(const MatrixX3<Scalar>& grads_param, const Matrix3<Scalar>& J) {
  const Eigen::Index ne = grads_param.rows();
  Matrix6X<Scalar> B(6, 3 * ne);
  const auto g1 = J.col(0).transpose(), g2 = J.col(1).transpose(), g3 = J.col(2).transpose();
  for (Eigen::Index k = 0; k < ne; ++k) {
    const Scalar d1 = grads_param(k, 0), d2 = grads_param(k, 1), d3 = grads_param(k, 2);
    auto Bk = B.template middleCols<3>(3 * k);
    Bk.row(0) = d1 * g1;
    Bk.row(1) = d2 * g2;
    Bk.row(2) = d3 * g3;
    Bk.row(3) = d1 * g2 + d2 * g1;
    Bk.row(4) = d1 * g3 + d3 * g1;
    Bk.row(5) = d2 * g3 + d3 * g2;
  }
  return B;
}

/// Voigt transformation of a symmetric tensor T -> A^T T A, both sides in engineering
/// Voigt form. With A = J this maps Cartesian strains to covariant strains (the matrix R);
/// with A = J^{-1} it is R^{-1}.
template <typename Scalar>
Matrix6<Scalar> strain_transformation(const Matrix3<Scalar>& A) {
  static constexpr int pair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  Matrix6<Scalar> R;
  for (int r = 0; r < 6; ++r) {
    const int i = pair[r][0], j = pair[r][1];
    const Scalar row_factor = i == j ? Scalar(1) : Scalar(2);
    for (int c = 0; c < 6; ++c) {
      const int a = pair[c][0], b = pair[c][1];
      R(r, c) = a == b ? row_factor * A(a, i) * A(a, j)
                       : row_factor * (A(a, i) * A(b, j) + A(b, i) * A(a, j)) / Scalar(2);
    }
  }
  return R;
}

/// B for every quadrature point of the element.
template <typename Scalar>
std::vector<Matrix6X<Scalar>> b_cartesian(const ElementKinematics<Scalar>& kin) {
  std::vector<Matrix6X<Scalar>> out;
  out.reserve(kin.num_points());
  for (const auto& qp : kin.points) out.push_back(b_from_gradients(qp.basis.grads_cart));
  return out;
}

template <typename Scalar>
struct CurvilinearFields {
  std::vector<Matrix6X<Scalar>> B;      ///< B-tilde per point
  std::vector<Matrix6<Scalar>> R;
  std::vector<Matrix6<Scalar>> D_tilde;  ///< R^{-T} D R^{-1}
};

template <typename Scalar>
CurvilinearFields<Scalar> b_curvilinear(const ElementKinematics<Scalar>& kin, const Matrix6<Scalar>& D) {
  CurvilinearFields<Scalar> out;
  for (const auto& qp : kin.points) {
    out.B.push_back(b_covariant(qp.basis.grads_param, qp.jacobian));
    out.R.push_back(strain_transformation(qp.jacobian));
    const Matrix6<Scalar> R_inv = strain_transformation<Scalar>(qp.jacobian.inverse());
    out.D_tilde.push_back(R_inv.transpose() * D * R_inv);
  }
  return out;
}

namespace detail {

template <typename Scalar>
void check_projection_degree(const ElementKinematics<Scalar>& kin, int projector_degree) {
  const auto& p = kin.degrees;
  if (p[0] != p[1] || p[1] != p[2])
    throw InvalidArgument("projected formulations need the same degree in all three directions");
  if (projector_degree != p[0])
    throw InvalidArgument("projector degree " + std::to_string(projector_degree) + " does not match element degree " +
                          std::to_string(p[0]));
  if (kin.num_points() != (p[0] + 1) * (p[0] + 1) * (p[0] + 1))
    throw InvalidArgument("projected formulations require the (p+1)^3 Gauss rule");
}

/// Projects row `row` of every per-point matrix through `P` (an n_q x n_q point-value operator).
template <typename Scalar>
void project_row(std::vector<Matrix6X<Scalar>>& Bs, int row, const MatrixX<Scalar>& P) {
  const int nq = static_cast<int>(Bs.size());
  MatrixX<Scalar> stacked(nq, Bs.front().cols());
  for (int q = 0; q < nq; ++q) stacked.row(q) = Bs[q].row(row);
  const MatrixX<Scalar> projected = P * stacked;
  for (int q = 0; q < nq; ++q) Bs[q].row(row) = projected.row(q);
}

}  // namespace detail

/// B-bar of the ANS-inspired formulation: rows (11, 13) through Pi^(1,1), rows (22, 23)
/// through Pi^(2,2), row 12 through Pi^(1,2); the thickness-normal row 33 is left as is.
template <typename Scalar>
std::vector<Matrix6X<Scalar>> b_projected_curvilinear(const ElementKinematics<Scalar>& kin,
                                                      std::vector<Matrix6X<Scalar>> b_tilde,
                                                      const ProjectionSet<Scalar>& proj) {
  detail::check_projection_degree(kin, proj.degree);
  detail::project_row(b_tilde, 0, proj.p11.matrix);
  detail::project_row(b_tilde, 4, proj.p11.matrix);
  detail::project_row(b_tilde, 1, proj.p22.matrix);
  detail::project_row(b_tilde, 5, proj.p22.matrix);
  detail::project_row(b_tilde, 3, proj.p12.matrix);
  return b_tilde;
}

template <typename Scalar>
struct ProjectedCartesianFields {
  std::vector<MatrixX3<Scalar>> grads;  ///< projected Cartesian derivatives per point
  std::vector<Matrix6X<Scalar>> B;      ///< B-hat per point
};

/// Every Cartesian derivative field N_{k,x_i} replaced by its Pi^(1,2) projection.
template <typename Scalar>
ProjectedCartesianFields<Scalar> b_projected_cartesian(const ElementKinematics<Scalar>& kin,
                                                       const ProjectionOperator<Scalar>& p12) {
  detail::check_projection_degree(kin, p12.degree);
  const int nq = kin.num_points(), ne = kin.num_functions();
  ProjectedCartesianFields<Scalar> out;
  out.grads.assign(nq, MatrixX3<Scalar>(ne, 3));
  MatrixX<Scalar> samples(nq, ne);
  for (int i = 0; i < 3; ++i) {
    for (int q = 0; q < nq; ++q) samples.row(q) = kin.points[q].basis.grads_cart.col(i).transpose();
    const MatrixX<Scalar> projected = p12.matrix * samples;
    for (int q = 0; q < nq; ++q) out.grads[q].col(i) = projected.row(q).transpose();
  }
  out.B.reserve(nq);
  for (int q = 0; q < nq; ++q) out.B.push_back(b_from_gradients(out.grads[q]));
  return out;
}

/// k_e = sum_q B_q^T D_q B_q w_q.
template <typename Scalar>
MatrixX<Scalar> integrate_stiffness(const ElementKinematics<Scalar>& kin, const std::vector<Matrix6X<Scalar>>& Bs,
                                    const std::vector<Matrix6<Scalar>>& Ds) {
  const int n = kin.num_dofs();
  MatrixX<Scalar> k = MatrixX<Scalar>::Zero(n, n);
  Matrix6X<Scalar> DB(6, n);
  for (int q = 0; q < kin.num_points(); ++q) {
    const Matrix6<Scalar>& D = Ds.size() == 1 ? Ds.front() : Ds[q];
    DB.noalias() = (kin.points[q].weight * D) * Bs[q];
    k.noalias() += Bs[q].transpose() * DB;
  }
  return k;
}

/// Element stiffness in the requested formulation. `proj` is required for SS and SS_ANS.
template <typename Scalar>
MatrixX<Scalar> stiffness(Formulation f, const ElementKinematics<Scalar>& kin, const Matrix6<Scalar>& D,
                          const ProjectionSet<Scalar>* proj = nullptr) {
  if (is_projected(f) && proj == nullptr) throw InvalidArgument("projected formulation needs projection operators");
  switch (f) {
    case Formulation::Standard:
      return integrate_stiffness(kin, b_cartesian(kin), {D});
    case Formulation::Curvilinear: {
      const auto cf = b_curvilinear(kin, D);
      return integrate_stiffness(kin, cf.B, cf.D_tilde);
    }
    case Formulation::ProjectedCurvilinear: {
      auto cf = b_curvilinear(kin, D);
      const auto b_bar = b_projected_curvilinear(kin, std::move(cf.B), *proj);
      return integrate_stiffness(kin, b_bar, cf.D_tilde);
    }
    case Formulation::ProjectedCartesian:
      return integrate_stiffness(kin, b_projected_cartesian(kin, proj->p12).B, {D});
  }
  throw InvalidArgument("unknown formulation");
}

}  // namespace igass
