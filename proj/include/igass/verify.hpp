#pragma once

/** @file verify.hpp
 *  @brief Self-checks run by `igass verify` and by the acceptance suite.
 *
 *  Each check returns a named pass/fail record with the measured quantity, so a
 *  failure report says which property broke and by how much.
 */

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "igass/elements.hpp"
#include "igass/splines.hpp"

namespace igass {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   ///< the worst error seen
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20191007;
  int random_elements = 100;
  /// Test hook: added to entry (0,0) of the closed-form p=1 S^(1,1) block before comparison.
  double closed_form_perturbation = 0.0;
};

/// Unit cube with its eight corners moved randomly by up to `amplitude`, one trilinear
/// element elevated to `degree` and split into `elements` per direction.
NurbsPatch3d<double> random_trilinear_patch(std::mt19937_64& rng, int degree, const std::array<int, 3>& elements,
                                            double amplitude = 0.2);

/// Single rational element of degree 2 with randomly perturbed control points and weights.
NurbsPatch3d<double> random_curved_element(std::mt19937_64& rng, double amplitude = 0.1);

/// Relative energy error of the constant-strain field with symmetric gradient `grad`
/// (u = grad x) on a patch: |U^T K U - eps0^T D eps0 V| / (eps0^T D eps0 V).
double patch_test_error(const NurbsPatch3d<double>& patch, Formulation f, const Matrix6<double>& D,
                        const Matrix3<double>& grad);

CheckResult check_closed_form_match(const VerifyOptions& options = {});
CheckResult check_projector_idempotence(const VerifyOptions& options = {});
CheckResult check_frame_equivalence(const VerifyOptions& options = {});
CheckResult check_curvilinear_energy(const VerifyOptions& options = {});
CheckResult check_rigid_modes(const VerifyOptions& options = {});
CheckResult check_patch_tests(const VerifyOptions& options = {});

/// All of the above in a fixed order.
std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

}  // namespace igass
