#pragma once

#include <stdexcept>
#include <string>

namespace igass {

/// Parametric coordinate or index outside the admissible domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input (knot vectors, patch grids, material constants, configs).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Jacobian of the geometric map is singular or inverted at an evaluation point.
class SingularGeometry : public std::runtime_error {
 public:
  SingularGeometry(double det_j, const std::string& where)
      : std::runtime_error("singular geometry (det J = " + std::to_string(det_j) + ")" +
                           (where.empty() ? std::string() : " at " + where)),
        det_j_(det_j) {}

  double det_j() const noexcept { return det_j_; }

 private:
  double det_j_;
};

/// The reduced stiffness matrix has (numerically) zero-energy modes.
class SingularSystem : public std::runtime_error {
 public:
  explicit SingularSystem(int zero_modes)
      : std::runtime_error("singular stiffness matrix: " + std::to_string(zero_modes) +
                           " zero-energy mode(s) detected"),
        zero_modes_(zero_modes) {}

  int zero_modes() const noexcept { return zero_modes_; }

 private:
  int zero_modes_;
};

}  // namespace igass
