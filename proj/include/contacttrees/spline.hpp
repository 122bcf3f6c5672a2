#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "contacttrees/error.hpp"
#include "contacttrees/geometry.hpp"

namespace contacttrees {

/// Chain of cubic Bezier pieces sharing end points. Rows of `controls` are
/// p0, c0a, c0b, p1, c1a, c1b, p2, ... so piece i uses rows 3i..3i+3.
template <typename Scalar>
struct CubicChain {
  Points2<Scalar> controls;

  Eigen::Index pieces() const { return controls.rows() < 4 ? 0 : (controls.rows() - 1) / 3; }

  Vec2<Scalar> knot(Eigen::Index i) const { return controls.row(3 * i).transpose(); }

  /// Point on piece `i` at local parameter u in [0, 1].
  Vec2<Scalar> evaluate(Eigen::Index i, Scalar u) const {
    const Scalar v = Scalar(1) - u;
    const auto c = controls.middleRows(3 * i, 4);
    return (v * v * v * c.row(0) + Scalar(3) * v * v * u * c.row(1) +
            Scalar(3) * v * u * u * c.row(2) + u * u * u * c.row(3))
        .transpose();
  }

  Vec2<Scalar> derivative(Eigen::Index i, Scalar u) const {
    const Scalar v = Scalar(1) - u;
    const auto c = controls.middleRows(3 * i, 4);
    return (Scalar(3) * v * v * (c.row(1) - c.row(0)) + Scalar(6) * v * u * (c.row(2) - c.row(1)) +
            Scalar(3) * u * u * (c.row(3) - c.row(2)))
        .transpose();
  }

  /// Global parameter t in [0, 1], pieces equally weighted. t = 0 and t = 1
  /// return the end knots exactly.
  Vec2<Scalar> at(Scalar t) const {
    const Eigen::Index n = pieces();
    if (t <= Scalar(0)) return knot(0);
    if (t >= Scalar(1)) return knot(n);
    const Scalar x = t * Scalar(n);
    const Eigen::Index i = std::min<Eigen::Index>(Eigen::Index(std::floor(x)), n - 1);
    return evaluate(i, x - Scalar(i));
  }
};

/// Clamped cubic spline through `knots` with uniform parameter spacing,
/// returned as Bezier pieces. Interior derivatives solve
/// D[i-1] + 4 D[i] + D[i+1] = 3 (P[i+1] - P[i-1]) with D[0], D[n-1] given,
/// so the chain is C2 and passes through every knot.
template <typename Derived>
CubicChain<typename Derived::Scalar> interpolate_clamped(
    const Eigen::MatrixBase<Derived>& knots, const Vec2<typename Derived::Scalar>& start_tangent,
    const Vec2<typename Derived::Scalar>& end_tangent) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = knots.rows();
  if (n < 2) throw Error(ErrorKind::DegeneratePolyline, "spline needs at least two knots");

  Points2<Scalar> d(n, 2);
  d.row(0) = start_tangent.transpose();
  d.row(n - 1) = end_tangent.transpose();
  const Eigen::Index m = n - 2;
  if (m > 0) {
    // Thomas algorithm on the constant (1, 4, 1) tridiagonal system.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(m);
    Points2<Scalar> rhs(m, 2);
    for (Eigen::Index k = 0; k < m; ++k)
      rhs.row(k) = Scalar(3) * (knots.row(k + 2) - knots.row(k));
    rhs.row(0) -= d.row(0);
    rhs.row(m - 1) -= d.row(n - 1);
    c(0) = Scalar(1) / Scalar(4);
    rhs.row(0) /= Scalar(4);
    for (Eigen::Index k = 1; k < m; ++k) {
      const Scalar denom = Scalar(4) - c(k - 1);
      c(k) = Scalar(1) / denom;
      rhs.row(k) = (rhs.row(k) - rhs.row(k - 1)) / denom;
    }
    for (Eigen::Index k = m - 2; k >= 0; --k) rhs.row(k) -= c(k) * rhs.row(k + 1);
    d.middleRows(1, m) = rhs;
  }

  CubicChain<Scalar> chain;
  chain.controls.resize(3 * (n - 1) + 1, 2);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    chain.controls.row(3 * i) = knots.row(i);
    chain.controls.row(3 * i + 1) = knots.row(i) + d.row(i) / Scalar(3);
    chain.controls.row(3 * i + 2) = knots.row(i + 1) - d.row(i + 1) / Scalar(3);
  }
  chain.controls.row(3 * (n - 1)) = knots.row(n - 1);
  return chain;
}

/// Resamples a polyline uniformly by arc length and interpolates the samples.
/// At least `min_samples` samples are used; when `max_spacing` > 0 the count
/// grows until consecutive samples are no further apart than that. End
/// tangents follow the first and last non-degenerate segments.
template <typename Derived>
CubicChain<typename Derived::Scalar> smooth_polyline(const Eigen::MatrixBase<Derived>& points,
                                                     Eigen::Index min_samples,
                                                     typename Derived::Scalar max_spacing) {
  using Scalar = typename Derived::Scalar;
  const auto lengths = segment_lengths(points);
  const Scalar total = lengths.sum();
  if (points.rows() < 2 || !(total > Scalar(0)) || !std::isfinite(double(total)))
    throw Error(ErrorKind::DegeneratePolyline, "polyline has fewer than two distinct points");

  Eigen::Index count = std::max<Eigen::Index>(min_samples, 2);
  if (max_spacing > Scalar(0))
    count = std::max<Eigen::Index>(count, Eigen::Index(std::ceil(total / max_spacing)) + 1);
  const auto samples = resample_uniform(points, count);
  const Scalar step = total / Scalar(count - 1);

  auto direction = [&](Eigen::Index seg) -> Vec2<Scalar> {
    return (points.row(seg + 1) - points.row(seg)).transpose() / lengths(seg);
  };
  Eigen::Index first = 0;
  while (lengths(first) == Scalar(0)) ++first;
  Eigen::Index last = lengths.size() - 1;
  while (lengths(last) == Scalar(0)) --last;
  return interpolate_clamped(samples, Vec2<Scalar>(step * direction(first)),
                             Vec2<Scalar>(step * direction(last)));
}

}  // namespace contacttrees
