#pragma once

/** @file projection.hpp
 *  @brief Element-local L2 projections onto reduced tensor-product polynomial spaces.
 *
 *  A projector acts on point values sampled at the (p+1)^3 Gauss points of the
 *  reference element [-1,1]^3 (lexicographic order, first direction fastest) and
 *  returns the point values of the L2-best approximation in Q_{q,r,s}. The inner
 *  product is the unweighted parametric one, so the operator is the same for
 *  every element of a patch.
 */

#include <array>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Dense>

#include "igass/errors.hpp"
#include "igass/quadrature.hpp"

namespace igass {

/// Q_{q,r,s}: polynomial degrees per parametric direction.
struct ReducedSpace {
  std::array<int, 3> degrees{};

  int dimension() const { return (degrees[0] + 1) * (degrees[1] + 1) * (degrees[2] + 1); }
  auto operator<=>(const ReducedSpace&) const = default;
};

template <typename Scalar>
struct ProjectionOperator {
  int degree = 0;  ///< p of the element; n_q = (p+1)^3
  ReducedSpace space;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
  /// (p+1)^2 x (p+1)^2 diagonal block; present when the third direction is unreduced.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block;

  int num_points() const { return static_cast<int>(matrix.rows()); }
  bool has_block() const { return block.size() > 0; }
};

/// Legendre polynomial P_n(x).
template <typename Scalar>
Scalar legendre(int n, Scalar x) {
  if (n == 0) return Scalar(1);
  Scalar p0(1), p1 = x;
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
    p0 = p1;
    p1 = pk;
  }
  return p1;
}

/// P = Theta (Theta^T W Theta)^{-1} Theta^T W with Theta the tensor Legendre basis of
/// the reduced space sampled at the (p+1)-point Gauss tensor rule.
template <typename Scalar>
ProjectionOperator<Scalar> build_projector(int p, const ReducedSpace& space) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (p < 1) throw InvalidArgument("projector degree must be >= 1");
  for (const int d : space.degrees)
    if (d < 0 || d > p)
      throw InvalidArgument("reduced-space degree " + std::to_string(d) + " outside [0, " + std::to_string(p) + "]");
  const auto rule = element_rule<Scalar>({p, p, p});
  const int nq = rule.size();
  const int dim = space.dimension();
  if (dim > nq) throw InvalidArgument("reduced space larger than the number of quadrature points");

  Mat theta(nq, dim);
  for (int q = 0; q < nq; ++q) {
    int col = 0;
    for (int c = 0; c <= space.degrees[2]; ++c)
      for (int b = 0; b <= space.degrees[1]; ++b)
        for (int a = 0; a <= space.degrees[0]; ++a, ++col)
          theta(q, col) = legendre(a, rule.points(q, 0)) * legendre(b, rule.points(q, 1)) *
                          legendre(c, rule.points(q, 2));
  }
  const Mat theta_w = theta.transpose() * rule.weights.asDiagonal();
  const Mat gram = theta_w * theta;

  ProjectionOperator<Scalar> op;
  op.degree = p;
  op.space = space;
  op.matrix = theta * gram.ldlt().solve(theta_w);
  if (space.degrees[2] == p) {
    const int nb = (p + 1) * (p + 1);
    op.block = op.matrix.topLeftCorner(nb, nb);
  }
  return op;
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> apply_projector(const ProjectionOperator<Scalar>& op,
                                                                      const Eigen::MatrixBase<Derived>& samples) {
  if (samples.rows() != op.num_points())
    throw InvalidArgument("projector expects " + std::to_string(op.num_points()) + " samples, got " +
                          std::to_string(samples.rows()));
  return op.matrix * samples;
}

/// The three block matrices S^(1,1), S^(2,2), S^(1,2) in closed form.
template <typename Scalar>
struct ClosedFormBlocks {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> s11, s22, s12;
};

/// Exact rational blocks for p = 1 and p = 2; higher degrees go through build_projector.
template <typename Scalar>
ClosedFormBlocks<Scalar> closed_form_blocks(int p) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  ClosedFormBlocks<Scalar> s;
  if (p == 1) {
    s.s11.resize(4, 4);
    s.s11 << 1, 1, 0, 0,
             1, 1, 0, 0,
             0, 0, 1, 1,
             0, 0, 1, 1;
    s.s11 /= Scalar(2);
    s.s22.resize(4, 4);
    s.s22 << 1, 0, 1, 0,
             0, 1, 0, 1,
             1, 0, 1, 0,
             0, 1, 0, 1;
    s.s22 /= Scalar(2);
    s.s12 = Mat::Constant(4, 4, Scalar(1) / Scalar(4));
    return s;
  }
  if (p == 2) {
    s.s11 = Mat::Zero(9, 9);
    s.s22 = Mat::Zero(9, 9);
    const Scalar line[3][3] = {{14, 8, -4}, {5, 8, 5}, {-4, 8, 14}};
    for (int blk = 0; blk < 3; ++blk)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          s.s11(3 * blk + r, 3 * blk + c) = line[r][c];
          s.s22(3 * r + blk, 3 * c + blk) = line[r][c];
        }
    s.s11 /= Scalar(18);
    s.s22 /= Scalar(18);
    s.s12.resize(9, 9);
    s.s12 << 196, 112, -56, 112, 64, -32, -56, -32, 16,
              70, 112,  70,  40, 64,  40, -20, -32, -20,
             -56, 112, 196, -32, 64, 112,  16, -32, -56,
              70,  40, -20, 112, 64, -32,  70,  40, -20,
              25,  40,  25,  40, 64,  40,  25,  40,  25,
             -20,  40,  70, -32, 64, 112, -20,  40,  70,
             -56, -32,  16, 112, 64, -32, 196, 112, -56,
             -20, -32, -20,  40, 64,  40,  70, 112,  70,
              16, -32, -56, -32, 64, 112, -56, 112, 196;
    s.s12 /= Scalar(324);
    return s;
  }
  throw InvalidArgument("closed-form projection blocks exist only for p = 1 and p = 2");
}

/// Block-diagonal expansion of a block S into the full n_q x n_q operator.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expand_block(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& block, int p) {
  const Eigen::Index nb = block.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> full =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(nb * (p + 1), nb * (p + 1));
  for (int k = 0; k <= p; ++k) full.block(k * nb, k * nb, nb, nb) = block;
  return full;
}

/// The three operators used by the projected formulations for degree p:
/// Q^(1,1) = Q_{p-1,p,p}, Q^(2,2) = Q_{p,p-1,p}, Q^(1,2) = Q_{p-1,p-1,p}.
template <typename Scalar>
struct ProjectionSet {
  int degree = 0;
  ProjectionOperator<Scalar> p11, p22, p12;
};

template <typename Scalar>
ProjectionSet<Scalar> build_projection_set(int p) {
  ProjectionSet<Scalar> set;
  set.degree = p;
  set.p11 = build_projector<Scalar>(p, ReducedSpace{{p - 1, p, p}});
  set.p22 = build_projector<Scalar>(p, ReducedSpace{{p, p - 1, p}});
  set.p12 = build_projector<Scalar>(p, ReducedSpace{{p - 1, p - 1, p}});
  return set;
}

/// Cached per degree; the returned reference stays valid for the program lifetime.
template <typename Scalar>
const ProjectionSet<Scalar>& projection_set(int p) {
  static std::mutex mutex;
  static std::map<int, ProjectionSet<Scalar>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, build_projection_set<Scalar>(p)).first;
  return it->second;
}

}  // namespace igass
