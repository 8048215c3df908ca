#include "igass/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "igass/assembly.hpp"
#include "igass/projection.hpp"

namespace igass {

namespace {

using Vec3 = Vector3<double>;
using Mat = MatrixX<double>;

std::array<KnotVector<double>, 3> linear_knots() {
  return {KnotVector<double>::uniform(1, 1), KnotVector<double>::uniform(1, 1), KnotVector<double>::uniform(1, 1)};
}

/// Voigt vector (engineering shear) of the symmetric part of a displacement gradient.
Eigen::Matrix<double, 6, 1> voigt_strain(const Matrix3<double>& grad) {
  const Matrix3<double> e = 0.5 * (grad + grad.transpose());
  Eigen::Matrix<double, 6, 1> v;
  v << e(0, 0), e(1, 1), e(2, 2), 2 * e(0, 1), 2 * e(0, 2), 2 * e(1, 2);
  return v;
}

/// Displacement coefficients of u = A x + b on a patch (exact for any NURBS geometry).
VectorX<double> linear_field(const NurbsPatch3d<double>& patch, const Matrix3<double>& A, const Vec3& b) {
  VectorX<double> U(3 * patch.num_control_points());
  for (int k = 0; k < patch.num_control_points(); ++k)
    U.segment<3>(3 * k) = A * patch.control_points().row(k).transpose() + b;
  return U;
}

Matrix3<double> skew(const Vec3& w) {
  Matrix3<double> S;
  S << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
  return S;
}

Matrix3<double> random_symmetric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix3<double> A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
  return 0.5 * (A + A.transpose());
}

std::string format_error(double value) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << value;
  return os.str();
}

CheckResult finish(std::string name, double worst, double tol, std::string detail = {}) {
  return {std::move(name), worst <= tol, worst, tol, std::move(detail)};
}

}  // namespace

NurbsPatch3d<double> random_trilinear_patch(std::mt19937_64& rng, int degree, const std::array<int, 3>& elements,
                                            double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  MatrixX3<double> cp(8, 3);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) cp.row(i + 2 * (j + 2 * k)) << i + u(rng), j + u(rng), k + u(rng);
  NurbsPatch3d<double> patch(linear_knots(), cp);
  for (int d = 0; d < 3; ++d) {
    while (patch.degree(d) < degree) patch = elevate_degree(patch, d);
    patch = refine_uniform(patch, d, elements[d]);
  }
  return patch;
}

NurbsPatch3d<double> random_curved_element(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude), w(0.7, 1.3);
  NurbsPatch3d<double> patch(linear_knots(), [] {
    MatrixX3<double> cp(8, 3);
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) cp.row(i + 2 * (j + 2 * k)) << i, j, k;
    return cp;
  }());
  for (int d = 0; d < 3; ++d) patch = elevate_degree(patch, d);
  MatrixX3<double> cp = patch.control_points();
  VectorX<double> wt(cp.rows());
  for (Eigen::Index r = 0; r < cp.rows(); ++r) {
    cp.row(r) += Vec3(u(rng), u(rng), u(rng)).transpose();
    wt[r] = w(rng);
  }
  std::array<KnotVector<double>, 3> kv = {patch.knots(0), patch.knots(1), patch.knots(2)};
  return NurbsPatch3d<double>(kv, cp, wt);
}

double patch_test_error(const NurbsPatch3d<double>& patch, Formulation f, const Matrix6<double>& D,
                        const Matrix3<double>& grad) {
  const SparseMatrix<double> K = assemble_stiffness(patch, f, D);
  const VectorX<double> U = linear_field(patch, grad, Vec3::Zero());
  const Eigen::Matrix<double, 6, 1> eps = voigt_strain(grad);
  const double exact = eps.dot(D * eps) * patch_volume(patch);
  return std::abs(U.dot(K * U) - exact) / exact;
}

CheckResult check_closed_form_match(const VerifyOptions& options) {
  double worst = 0.0;
  for (const int p : {1, 2}) {
    auto closed = closed_form_blocks<double>(p);
    if (p == 1) closed.s11(0, 0) += options.closed_form_perturbation;
    const auto set = build_projection_set<double>(p);
    const std::pair<const Mat*, const ProjectionOperator<double>*> pairs[] = {
        {&closed.s11, &set.p11}, {&closed.s22, &set.p22}, {&closed.s12, &set.p12}};
    for (const auto& [block, op] : pairs) {
      worst = std::max(worst, (*block - op->block).cwiseAbs().maxCoeff());
      worst = std::max(worst, (expand_block(*block, p) - op->matrix).cwiseAbs().maxCoeff());
    }
  }
  return finish("closed_form_match", worst, 1e-13, "max entry difference, p = 1, 2");
}

CheckResult check_projector_idempotence(const VerifyOptions&) {
  double worst = 0.0;
  for (int p = 1; p <= 3; ++p) {
    const auto set = build_projection_set<double>(p);
    for (const auto* op : {&set.p11, &set.p22, &set.p12})
      worst = std::max(worst, (op->matrix * op->matrix - op->matrix).cwiseAbs().maxCoeff());
  }
  return finish("projector_idempotence", worst, 1e-12, "max |P^2 - P|, p = 1, 2, 3");
}

CheckResult check_frame_equivalence(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  double worst = 0.0;
  for (int e = 0; e < options.random_elements; ++e) {
    const auto patch = random_curved_element(rng);
    const auto kin = element_kinematics(patch, {0, 0, 0});
    for (const auto& qp : kin.points) {
      const Matrix6X<double> b_tilde = b_covariant(qp.basis.grads_param, qp.jacobian);
      const Matrix6X<double> rb = strain_transformation(qp.jacobian) * b_from_gradients(qp.basis.grads_cart);
      worst = std::max(worst, (b_tilde - rb).norm() / b_tilde.norm());
    }
  }
  return finish("frame_equivalence", worst, 1e-12,
                "max |B~ - R B| / |B~| over " + std::to_string(options.random_elements) + " random elements");
}

CheckResult check_curvilinear_energy(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed + 1);
  const Matrix6<double> D = material_matrix(1.0, 0.3).D;
  double worst = 0.0;
  for (int e = 0; e < options.random_elements; ++e) {
    const auto kin = element_kinematics(random_curved_element(rng), {0, 0, 0});
    const Mat k_std = stiffness(Formulation::Standard, kin, D);
    const Mat k_curv = stiffness(Formulation::Curvilinear, kin, D);
    worst = std::max(worst, (k_curv - k_std).norm() / k_std.norm());
  }
  return finish("curvilinear_energy", worst, 1e-10, "max |k(CURV) - k(STD)| / |k(STD)|");
}

CheckResult check_rigid_modes(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed + 2);
  const Matrix6<double> D = material_matrix(1.0, 0.3).D;
  double worst = 0.0;
  std::string detail = "max rigid-mode Rayleigh quotient / |k_e|";
  const int samples = std::max(1, options.random_elements / 10);
  for (int e = 0; e < samples; ++e) {
    const auto patch = random_curved_element(rng);
    const auto kin = element_kinematics(patch, {0, 0, 0});
    for (const Formulation f : kAllFormulations) {
      const Mat ke = stiffness(f, kin, D, &projection_set<double>(2));
      const double norm = ke.norm();
      // six rigid fields: three translations and three linearized rotations
      for (int m = 0; m < 6; ++m) {
        Vec3 axis = Vec3::Zero();
        axis[m % 3] = 1.0;
        const VectorX<double> u = m < 3 ? linear_field(patch, Matrix3<double>::Zero(), axis)
                                        : linear_field(patch, skew(axis), Vec3::Zero());
        worst = std::max(worst, u.dot(ke * u) / (norm * u.squaredNorm()));
        worst = std::max(worst, (ke * u).norm() / (norm * u.norm()));
      }
      // the kernel holds at least the six rigid modes
      const Eigen::SelfAdjointEigenSolver<Mat> eig(ke, Eigen::EigenvaluesOnly);
      const double sixth = eig.eigenvalues()[5] / eig.eigenvalues().maxCoeff();
      worst = std::max(worst, std::abs(sixth));
      // standard formulations: exactly six, the seventh is clearly positive
      if (!is_projected(f) && eig.eigenvalues()[6] / eig.eigenvalues().maxCoeff() < 1e-6) {
        worst = std::max(worst, 1.0);
        detail += "; " + std::string(to_string(f)) + " has a spurious zero mode";
      }
    }
  }
  return finish("rigid_modes", worst, 1e-9, detail);
}

CheckResult check_patch_tests(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed + 3);
  const Matrix6<double> D = material_matrix(1.0, 0.25).D;
  double worst = 0.0;
  std::string worst_case;
  // distorted trilinear maps, degree 2, multi-element
  for (int trial = 0; trial < 3; ++trial) {
    const auto patch = random_trilinear_patch(rng, 2, {2, 2, 2});
    for (const Formulation f : kAllFormulations) {
      const double err = patch_test_error(patch, f, D, random_symmetric(rng));
      if (err > worst) {
        worst = err;
        worst_case = std::string(to_string(f)) + " on a distorted trilinear patch";
      }
    }
  }
  // genuinely curved rational geometry: the Cartesian-frame formulations
  for (int trial = 0; trial < 3; ++trial) {
    const auto patch = refine_uniform(refine_uniform(random_curved_element(rng), 0, 2), 1, 2);
    for (const Formulation f : {Formulation::Standard, Formulation::Curvilinear, Formulation::ProjectedCartesian}) {
      const double err = patch_test_error(patch, f, D, random_symmetric(rng));
      if (err > worst) {
        worst = err;
        worst_case = std::string(to_string(f)) + " on a curved rational patch";
      }
    }
  }
  return finish("patch_tests", worst, 1e-10,
                "max relative energy error" + (worst_case.empty() ? "" : " (" + worst_case + ", " +
                                                                             format_error(worst) + ")"));
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  return {check_closed_form_match(options),     check_projector_idempotence(options), check_frame_equivalence(options),
          check_curvilinear_energy(options), check_rigid_modes(options),           check_patch_tests(options)};
}

}  // namespace igass
