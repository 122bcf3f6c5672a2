#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

namespace contacttrees {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// N x 2 point list, one point per row.
template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
using Box2 = Eigen::AlignedBox<Scalar, 2>;

using Vec2d = Vec2<double>;
using Points2d = Points2<double>;
using Box2d = Box2<double>;

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> segment_lengths(
    const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  if (n < 2) return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(0);
  return (points.bottomRows(n - 1) - points.topRows(n - 1)).rowwise().norm();
}

template <typename Derived>
typename Derived::Scalar polyline_length(const Eigen::MatrixBase<Derived>& points) {
  return segment_lengths(points).sum();
}

/// Point at arc length s from the start, clamped to the polyline.
template <typename Derived>
Vec2<typename Derived::Scalar> point_at_arc_length(const Eigen::MatrixBase<Derived>& points,
                                                   typename Derived::Scalar s) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  if (s <= Scalar(0)) return points.row(0).transpose();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    Vec2<Scalar> a = points.row(i).transpose();
    Vec2<Scalar> b = points.row(i + 1).transpose();
    Scalar len = (b - a).norm();
    if (s <= len && len > Scalar(0)) return a + (b - a) * (s / len);
    s -= len;
  }
  return points.row(n - 1).transpose();
}

/// `count` points spaced uniformly by arc length. The first and last rows
/// equal the polyline's end points exactly.
template <typename Derived>
Points2<typename Derived::Scalar> resample_uniform(const Eigen::MatrixBase<Derived>& points,
                                                   Eigen::Index count) {
  using Scalar = typename Derived::Scalar;
  const auto lengths = segment_lengths(points);
  const Scalar total = lengths.sum();
  Points2<Scalar> out(count, 2);
  Eigen::Index seg = 0;
  Scalar seg_start = 0;
  for (Eigen::Index k = 0; k < count; ++k) {
    if (k == 0) {
      out.row(k) = points.row(0);
      continue;
    }
    if (k == count - 1) {
      out.row(k) = points.row(points.rows() - 1);
      continue;
    }
    const Scalar s = total * Scalar(k) / Scalar(count - 1);
    while (seg + 1 < lengths.size() && seg_start + lengths(seg) < s) seg_start += lengths(seg++);
    const Scalar len = lengths(seg);
    const Scalar t = len > Scalar(0) ? std::clamp((s - seg_start) / len, Scalar(0), Scalar(1))
                                     : Scalar(0);
    out.row(k) = points.row(seg) + t * (points.row(seg + 1) - points.row(seg));
  }
  return out;
}

template <typename Scalar>
Scalar distance_to_segment(const Vec2<Scalar>& p, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  const Vec2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

template <typename Derived>
typename Derived::Scalar distance_to_polyline(const Vec2<typename Derived::Scalar>& p,
                                              const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  Scalar best = (p - points.row(0).transpose()).norm();
  for (Eigen::Index i = 0; i + 1 < points.rows(); ++i)
    best = std::min(best, distance_to_segment<Scalar>(p, points.row(i).transpose(),
                                                      points.row(i + 1).transpose()));
  return best;
}

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// True when segments ab and cd intersect at a single point interior to both.
/// Touching end points and collinear overlap do not count.
template <typename Scalar>
bool segments_properly_cross(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c,
                             const Vec2<Scalar>& d) {
  const Scalar d1 = cross2<Scalar>(b - a, c - a);
  const Scalar d2 = cross2<Scalar>(b - a, d - a);
  const Scalar d3 = cross2<Scalar>(d - c, a - c);
  const Scalar d4 = cross2<Scalar>(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

/// Unit vector rotated `degrees` clockwise from straight up (+y), mirrored for
/// the left side so that positive angles lean away from the trunk.
template <typename Scalar>
Vec2<Scalar> lean_from_vertical(Scalar degrees, bool leftward) {
  const Scalar r = degrees * Scalar(M_PI) / Scalar(180);
  return Vec2<Scalar>((leftward ? -1 : 1) * std::sin(r), std::cos(r));
}

/// Perpendicular of a direction, chosen to point upward (ties broken outward
/// from x = 0).
template <typename Scalar>
Vec2<Scalar> upper_normal(const Vec2<Scalar>& dir) {
  Vec2<Scalar> n(-dir.y(), dir.x());
  if (n.y() < Scalar(0) || (n.y() == Scalar(0) && n.x() * dir.x() < Scalar(0))) n = -n;
  return n;
}

}  // namespace contacttrees
