#pragma once

/** @file splines.hpp
 *  @brief Univariate B-spline bases and trivariate rational tensor-product patches.
 *
 *  A patch stores its control net in lexicographic order, the first parametric
 *  direction running fastest: cp index = i + n0 * (j + n1 * k).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "igass/errors.hpp"

namespace igass {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using MatrixX3 = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

template <typename Scalar>
class KnotVector {
 public:
  KnotVector() = default;

  KnotVector(int degree, std::vector<Scalar> knots) : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 1) throw InvalidArgument("knot vector degree must be >= 1");
    const int m = static_cast<int>(knots_.size());
    if (m < 2 * (degree_ + 1)) throw InvalidArgument("knot vector too short for its degree");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
      throw InvalidArgument("knots must be non-decreasing");
    if (multiplicity(knots_.front()) != degree_ + 1 || multiplicity(knots_.back()) != degree_ + 1)
      throw InvalidArgument("knot vector must be open: end knots repeated exactly p+1 times");
    for (int i = degree_ + 1; i < num_basis(); ++i)
      if (multiplicity(knots_[i]) > degree_)
        throw InvalidArgument("interior knot multiplicity exceeds the degree");
  }

  /// Open knot vector on [a, b] with `spans` equal knot spans.
  static KnotVector uniform(int degree, int spans, Scalar a = Scalar(0), Scalar b = Scalar(1)) {
    if (spans < 1) throw InvalidArgument("need at least one knot span");
    std::vector<Scalar> knots(degree + 1, a);
    for (int i = 1; i < spans; ++i) knots.push_back(a + (b - a) * Scalar(i) / Scalar(spans));
    knots.insert(knots.end(), degree + 1, b);
    return KnotVector(degree, std::move(knots));
  }

  int degree() const noexcept { return degree_; }
  const std::vector<Scalar>& knots() const noexcept { return knots_; }
  Scalar operator[](int i) const { return knots_[i]; }
  int size() const noexcept { return static_cast<int>(knots_.size()); }
  int num_basis() const noexcept { return size() - degree_ - 1; }
  Scalar front() const { return knots_.front(); }
  Scalar back() const { return knots_.back(); }

  int multiplicity(Scalar t) const {
    return static_cast<int>(std::count(knots_.begin(), knots_.end(), t));
  }

  bool contains(Scalar t) const { return t >= front() && t <= back(); }

  /// Index i of the nonempty span [knots[i], knots[i+1]) holding t; the right end maps to the last span.
  int find_span(Scalar t) const {
    if (!contains(t)) {
      std::ostringstream msg;
      msg << "parameter " << static_cast<double>(t) << " outside knot domain ["
          << static_cast<double>(front()) << ", " << static_cast<double>(back()) << "]";
      throw DomainError(msg.str());
    }
    const int n = num_basis();
    if (t >= knots_[n]) return n - 1;
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, t);
    return static_cast<int>(it - knots_.begin()) - 1;
  }

  /// Span indices of the nonempty knot spans (the Bezier elements), in increasing order.
  std::vector<int> element_spans() const {
    std::vector<int> spans;
    for (int i = degree_; i < num_basis(); ++i)
      if (knots_[i] < knots_[i + 1]) spans.push_back(i);
    return spans;
  }

  int num_elements() const { return static_cast<int>(element_spans().size()); }

  /// Distinct knot values.
  std::vector<Scalar> breakpoints() const {
    std::vector<Scalar> b = knots_;
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  /// Greville abscissae, one per basis function.
  std::vector<Scalar> greville() const {
    std::vector<Scalar> g(num_basis());
    for (int i = 0; i < num_basis(); ++i) {
      Scalar s(0);
      for (int j = 1; j <= degree_; ++j) s += knots_[i + j];
      g[i] = s / Scalar(degree_);
    }
    return g;
  }

 private:
  int degree_ = 0;
  std::vector<Scalar> knots_;
};

/// Nonzero B-splines at a parameter: row d holds the d-th derivatives of functions first..first+p.
template <typename Scalar>
struct BsplineDerivatives {
  int first = 0;
  MatrixX<Scalar> ders;
};

/// Values and derivatives up to `n_derivs` of the p+1 nonzero B-splines in span `span`.
template <typename Scalar>
BsplineDerivatives<Scalar> eval_bspline_basis(const KnotVector<Scalar>& kv, Scalar t, int n_derivs, int span) {
  const int p = kv.degree();
  const auto& U = kv.knots();
  n_derivs = std::min(n_derivs, p);
  MatrixX<Scalar> ndu(p + 1, p + 1);
  std::vector<Scalar> left(p + 1), right(p + 1);
  ndu(0, 0) = Scalar(1);
  for (int j = 1; j <= p; ++j) {
    left[j] = t - U[span + 1 - j];
    right[j] = U[span + j] - t;
    Scalar saved(0);
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const Scalar temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  BsplineDerivatives<Scalar> out;
  out.first = span - p;
  out.ders = MatrixX<Scalar>::Zero(n_derivs + 1, p + 1);
  for (int j = 0; j <= p; ++j) out.ders(0, j) = ndu(j, p);

  MatrixX<Scalar> a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = Scalar(1);
    for (int k = 1; k <= n_derivs; ++k) {
      Scalar d(0);
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      out.ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  Scalar factor(p);
  for (int k = 1; k <= n_derivs; ++k) {
    out.ders.row(k) *= factor;
    factor *= Scalar(p - k);
  }
  return out;
}

template <typename Scalar>
BsplineDerivatives<Scalar> eval_bspline_basis(const KnotVector<Scalar>& kv, Scalar t, int n_derivs) {
  return eval_bspline_basis(kv, t, n_derivs, kv.find_span(t));
}

/// Rational basis at a parametric point: active functions, values and parametric gradients.
template <typename Scalar>
struct BasisEval {
  std::vector<int> active;
  VectorX<Scalar> values;
  MatrixX3<Scalar> grads_param;
  MatrixX3<Scalar> grads_cart;  ///< filled only when the geometric map is evaluated
};

/// BasisEval plus the geometric map at the same point.
template <typename Scalar>
struct NurbsPointEval {
  BasisEval<Scalar> basis;
  Vector3<Scalar> x;
  Matrix3<Scalar> jacobian;  ///< columns are the covariant vectors g_1, g_2, g_3
  Scalar det_j;
};

template <typename Scalar>
class NurbsPatch3d {
 public:
  NurbsPatch3d() = default;

  NurbsPatch3d(std::array<KnotVector<Scalar>, 3> kv, MatrixX3<Scalar> control_points, VectorX<Scalar> weights)
      : kv_(std::move(kv)), cp_(std::move(control_points)), w_(std::move(weights)) {
    const Eigen::Index n = Eigen::Index(kv_[0].num_basis()) * kv_[1].num_basis() * kv_[2].num_basis();
    if (cp_.rows() != n || w_.size() != n) {
      std::ostringstream msg;
      msg << "control grid has " << cp_.rows() << " points and " << w_.size() << " weights, knot vectors imply "
          << n;
      throw InvalidArgument(msg.str());
    }
    if ((w_.array() <= Scalar(0)).any()) throw InvalidArgument("NURBS weights must be positive");
  }

  /// Polynomial patch (all weights one).
  NurbsPatch3d(std::array<KnotVector<Scalar>, 3> kv, MatrixX3<Scalar> control_points)
      : NurbsPatch3d(kv, control_points, VectorX<Scalar>::Ones(control_points.rows())) {}

  const KnotVector<Scalar>& knots(int dir) const { return kv_[dir]; }
  const std::array<KnotVector<Scalar>, 3>& knot_vectors() const { return kv_; }
  const MatrixX3<Scalar>& control_points() const { return cp_; }
  MatrixX3<Scalar>& control_points() { return cp_; }
  const VectorX<Scalar>& weights() const { return w_; }

  int degree(int dir) const { return kv_[dir].degree(); }
  std::array<int, 3> degrees() const { return {degree(0), degree(1), degree(2)}; }
  int num_basis(int dir) const { return kv_[dir].num_basis(); }
  int num_control_points() const { return static_cast<int>(cp_.rows()); }
  int index(int i, int j, int k) const { return i + num_basis(0) * (j + num_basis(1) * k); }
  std::array<int, 3> grid_index(int flat) const {
    const int n0 = num_basis(0), n1 = num_basis(1);
    return {flat % n0, (flat / n0) % n1, flat / (n0 * n1)};
  }
  int num_elements() const { return kv_[0].num_elements() * kv_[1].num_elements() * kv_[2].num_elements(); }

  bool contains(const Vector3<Scalar>& xi) const {
    return kv_[0].contains(xi[0]) && kv_[1].contains(xi[1]) && kv_[2].contains(xi[2]);
  }

 private:
  std::array<KnotVector<Scalar>, 3> kv_;
  MatrixX3<Scalar> cp_;
  VectorX<Scalar> w_;
};

/// Rational basis values and first parametric derivatives (quotient rule) in given spans.
template <typename Scalar>
BasisEval<Scalar> eval_basis(const NurbsPatch3d<Scalar>& patch, const Vector3<Scalar>& xi,
                             const std::array<int, 3>& spans) {
  std::array<BsplineDerivatives<Scalar>, 3> uni;
  for (int d = 0; d < 3; ++d) uni[d] = eval_bspline_basis(patch.knots(d), xi[d], 1, spans[d]);
  const int p0 = patch.degree(0) + 1, p1 = patch.degree(1) + 1, p2 = patch.degree(2) + 1;
  const int ne = p0 * p1 * p2;

  BasisEval<Scalar> out;
  out.active.resize(ne);
  out.values.resize(ne);
  out.grads_param.resize(ne, 3);
  const auto& w = patch.weights();
  Scalar W(0);
  Vector3<Scalar> dW = Vector3<Scalar>::Zero();
  int a = 0;
  for (int k = 0; k < p2; ++k)
    for (int j = 0; j < p1; ++j)
      for (int i = 0; i < p0; ++i, ++a) {
        const int g = patch.index(uni[0].first + i, uni[1].first + j, uni[2].first + k);
        const Scalar n0 = uni[0].ders(0, i), n1 = uni[1].ders(0, j), n2 = uni[2].ders(0, k);
        const Scalar b = n0 * n1 * n2;
        const Vector3<Scalar> db(uni[0].ders(1, i) * n1 * n2, n0 * uni[1].ders(1, j) * n2,
                                 n0 * n1 * uni[2].ders(1, k));
        out.active[a] = g;
        out.values[a] = w[g] * b;
        out.grads_param.row(a) = w[g] * db.transpose();
        W += w[g] * b;
        dW += w[g] * db;
      }
  for (int r = 0; r < ne; ++r) {
    const Scalar v = out.values[r];
    out.grads_param.row(r) = (out.grads_param.row(r) * W - v * dW.transpose()) / (W * W);
    out.values[r] = v / W;
  }
  return out;
}

template <typename Scalar>
BasisEval<Scalar> eval_basis(const NurbsPatch3d<Scalar>& patch, const Vector3<Scalar>& xi) {
  return eval_basis(patch, xi, {patch.knots(0).find_span(xi[0]), patch.knots(1).find_span(xi[1]),
                                patch.knots(2).find_span(xi[2])});
}

/// Geometric point and Jacobian from an evaluated basis; fills Cartesian gradients.
/// Throws SingularGeometry when J is (numerically) singular.
template <typename Scalar>
NurbsPointEval<Scalar> attach_geometry(const NurbsPatch3d<Scalar>& patch, BasisEval<Scalar> basis) {
  NurbsPointEval<Scalar> out;
  out.x.setZero();
  out.jacobian.setZero();
  const auto& cp = patch.control_points();
  for (std::size_t a = 0; a < basis.active.size(); ++a) {
    const Vector3<Scalar> xk = cp.row(basis.active[a]).transpose();
    out.x += basis.values[a] * xk;
    out.jacobian += xk * basis.grads_param.row(a);
  }
  out.det_j = out.jacobian.determinant();
  using std::abs;
  const Scalar scale = out.jacobian.colwise().norm().prod();
  if (!(abs(out.det_j) > Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale))
    throw SingularGeometry(static_cast<double>(out.det_j), "");
  // grad_x N = J^{-T} grad_xi N, stored row-wise: G_cart = G_param J^{-1}
  basis.grads_cart = basis.grads_param * out.jacobian.inverse();
  out.basis = std::move(basis);
  return out;
}

template <typename Scalar>
NurbsPointEval<Scalar> eval_nurbs_3d(const NurbsPatch3d<Scalar>& patch, const Vector3<Scalar>& xi) {
  if (!patch.contains(xi)) throw DomainError("parametric point outside the patch domain");
  return attach_geometry(patch, eval_basis(patch, xi));
}

/// Geometric map x(xi) only; valid also at degenerate points.
template <typename Scalar>
Vector3<Scalar> eval_point(const NurbsPatch3d<Scalar>& patch, const Vector3<Scalar>& xi) {
  if (!patch.contains(xi)) throw DomainError("parametric point outside the patch domain");
  const BasisEval<Scalar> b = eval_basis(patch, xi);
  Vector3<Scalar> x = Vector3<Scalar>::Zero();
  for (std::size_t a = 0; a < b.active.size(); ++a)
    x += b.values[a] * patch.control_points().row(b.active[a]).transpose();
  return x;
}

namespace detail {

/// Homogeneous control net (w*x, w*y, w*z, w).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 4> homogeneous(const NurbsPatch3d<Scalar>& patch) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> h(patch.num_control_points(), 4);
  h.template leftCols<3>() = patch.control_points().array().colwise() * patch.weights().array();
  h.col(3) = patch.weights();
  return h;
}

/// Replaces direction `dir` of the patch: every fiber of the homogeneous net along `dir`
/// is mapped through `fiber_map` (n_old x 4 -> n_new x 4).
template <typename Scalar, typename FiberMap>
NurbsPatch3d<Scalar> transform_direction(const NurbsPatch3d<Scalar>& patch, int dir, KnotVector<Scalar> new_kv,
                                         FiberMap&& fiber_map) {
  using Fiber = Eigen::Matrix<Scalar, Eigen::Dynamic, 4>;
  const auto h = homogeneous(patch);
  std::array<KnotVector<Scalar>, 3> kv = patch.knot_vectors();
  const std::array<int, 3> n_old = {patch.num_basis(0), patch.num_basis(1), patch.num_basis(2)};
  kv[dir] = std::move(new_kv);
  std::array<int, 3> n_new = n_old;
  n_new[dir] = kv[dir].num_basis();
  const int total = n_new[0] * n_new[1] * n_new[2];
  Fiber h_new(total, 4);

  const int o1 = (dir + 1) % 3, o2 = (dir + 2) % 3;
  auto flat = [](const std::array<int, 3>& n, const std::array<int, 3>& ijk) {
    return ijk[0] + n[0] * (ijk[1] + n[1] * ijk[2]);
  };
  for (int b = 0; b < n_old[o2]; ++b)
    for (int a = 0; a < n_old[o1]; ++a) {
      Fiber f(n_old[dir], 4);
      std::array<int, 3> ijk{};
      ijk[o1] = a;
      ijk[o2] = b;
      for (int i = 0; i < n_old[dir]; ++i) {
        ijk[dir] = i;
        f.row(i) = h.row(flat(n_old, ijk));
      }
      const Fiber g = fiber_map(f);
      for (int i = 0; i < n_new[dir]; ++i) {
        ijk[dir] = i;
        h_new.row(flat(n_new, ijk)) = g.row(i);
      }
    }
  VectorX<Scalar> w = h_new.col(3);
  MatrixX3<Scalar> cp = h_new.template leftCols<3>().array().colwise() / w.array();
  return NurbsPatch3d<Scalar>(std::move(kv), std::move(cp), std::move(w));
}

}  // namespace detail

/// Boehm knot insertion along `dir`. Each new knot must lie in the open parametric interval
/// and may not raise an interior multiplicity above the degree.
template <typename Scalar>
NurbsPatch3d<Scalar> insert_knots(const NurbsPatch3d<Scalar>& patch, int dir, std::vector<Scalar> new_knots) {
  if (dir < 0 || dir > 2) throw InvalidArgument("direction must be 0, 1 or 2");
  std::sort(new_knots.begin(), new_knots.end());
  NurbsPatch3d<Scalar> out = patch;
  for (const Scalar u : new_knots) {
    const KnotVector<Scalar>& kv = out.knots(dir);
    const int p = kv.degree();
    if (!(u > kv.front() && u < kv.back())) throw DomainError("inserted knot must lie strictly inside the domain");
    const int s = kv.multiplicity(u);
    if (s >= p) throw InvalidArgument("knot already has full multiplicity");
    const int k = kv.find_span(u);
    std::vector<Scalar> knots = kv.knots();
    knots.insert(knots.begin() + k + 1, u);
    KnotVector<Scalar> refined(p, std::move(knots));
    out = detail::transform_direction(out, dir, std::move(refined), [&](const auto& f) {
      using Fiber = Eigen::Matrix<Scalar, Eigen::Dynamic, 4>;
      const int n = static_cast<int>(f.rows());
      Fiber q(n + 1, 4);
      for (int i = 0; i <= n; ++i) {
        if (i <= k - p) {
          q.row(i) = f.row(i);
        } else if (i > k) {
          q.row(i) = f.row(i - 1);
        } else {
          const Scalar alpha = (u - kv[i]) / (kv[i + p] - kv[i]);
          q.row(i) = alpha * f.row(i) + (Scalar(1) - alpha) * f.row(i - 1);
        }
      }
      return q;
    });
  }
  return out;
}

/// Splits every existing knot span along `dir` into `parts` equal sub-spans.
template <typename Scalar>
NurbsPatch3d<Scalar> refine_uniform(const NurbsPatch3d<Scalar>& patch, int dir, int parts) {
  if (parts < 1) throw InvalidArgument("refinement factor must be >= 1");
  std::vector<Scalar> inserted;
  const auto bp = patch.knots(dir).breakpoints();
  for (std::size_t e = 0; e + 1 < bp.size(); ++e)
    for (int i = 1; i < parts; ++i) inserted.push_back(bp[e] + (bp[e + 1] - bp[e]) * Scalar(i) / Scalar(parts));
  return inserted.empty() ? patch : insert_knots(patch, dir, std::move(inserted));
}

/// Raises the degree along `dir` by one, keeping the continuity at every breakpoint.
/// The new homogeneous control net is obtained by collocating the unchanged curve at
/// the Greville abscissae of the elevated basis (Schoenberg-Whitney guarantees a
/// nonsingular system and the original curve lies in the elevated space).
template <typename Scalar>
NurbsPatch3d<Scalar> elevate_degree(const NurbsPatch3d<Scalar>& patch, int dir) {
  if (dir < 0 || dir > 2) throw InvalidArgument("direction must be 0, 1 or 2");
  const KnotVector<Scalar>& kv = patch.knots(dir);
  const int p = kv.degree();
  std::vector<Scalar> knots;
  for (const Scalar b : kv.breakpoints()) knots.insert(knots.end(), kv.multiplicity(b) + 1, b);
  KnotVector<Scalar> elevated(p + 1, std::move(knots));

  const int n_old = kv.num_basis(), n_new = elevated.num_basis();
  const auto tau = elevated.greville();
  MatrixX<Scalar> A = MatrixX<Scalar>::Zero(n_new, n_new), B = MatrixX<Scalar>::Zero(n_new, n_old);
  for (int r = 0; r < n_new; ++r) {
    const auto en = eval_bspline_basis(elevated, tau[r], 0);
    for (int c = 0; c <= p + 1; ++c) A(r, en.first + c) = en.ders(0, c);
    const auto eo = eval_bspline_basis(kv, tau[r], 0);
    for (int c = 0; c <= p; ++c) B(r, eo.first + c) = eo.ders(0, c);
  }
  const MatrixX<Scalar> M = A.fullPivLu().solve(B);
  return detail::transform_direction(patch, dir, std::move(elevated),
                                     [&](const auto& f) -> Eigen::Matrix<Scalar, Eigen::Dynamic, 4> { return M * f; });
}

}  // namespace igass
