#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

/// Closed-form space curve. Arc and helix are centered on `origin`, lying in
/// (or winding around the z axis of) the xy plane.
struct ParametricCurve {
  enum class Kind { Line, Arc, Helix } kind = Kind::Line;
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 direction{1.0, 0.0, 0.0};  // line only, unit length
  double length = 0.0;            // line only
  double radius = 0.0;            // arc, helix
  double angle = 0.0;             // arc, helix: swept angle in radians
  double pitch = 0.0;             // helix: z advance per radian

  static ParametricCurve line(const Vec3& from, const Vec3& to) {
    ParametricCurve c;
    c.origin = from;
    const Vec3 d{to[0] - from[0], to[1] - from[1], to[2] - from[2]};
    c.length = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if (c.length <= 0.0) throw Error(ErrorCode::InvalidArgument, "line: zero length");
    c.direction = {d[0] / c.length, d[1] / c.length, d[2] / c.length};
    return c;
  }
  static ParametricCurve arc(const Vec3& center, double radius, double angle) {
    if (radius <= 0.0 || angle <= 0.0) throw Error(ErrorCode::InvalidArgument, "arc: radius and angle must be positive");
    ParametricCurve c;
    c.kind = Kind::Arc;
    c.origin = center;
    c.radius = radius;
    c.angle = std::min(angle, 2.0 * std::numbers::pi);
    return c;
  }
  static ParametricCurve helix(const Vec3& center, double radius, double pitch, double angle) {
    if (radius <= 0.0 || angle <= 0.0) throw Error(ErrorCode::InvalidArgument, "helix: radius and angle must be positive");
    ParametricCurve c;
    c.kind = Kind::Helix;
    c.origin = center;
    c.radius = radius;
    c.pitch = pitch;
    c.angle = angle;
    return c;
  }

  bool closed() const { return kind == Kind::Arc && angle >= 2.0 * std::numbers::pi - 1e-12; }

  /// Point at normalized parameter s in [0, 1].
  Vec3 at(double s) const {
    switch (kind) {
      case Kind::Line:
        return {origin[0] + s * length * direction[0], origin[1] + s * length * direction[1],
                origin[2] + s * length * direction[2]};
      case Kind::Arc: {
        const double t = s * angle;
        return {origin[0] + radius * std::cos(t), origin[1] + radius * std::sin(t), origin[2]};
      }
      case Kind::Helix: {
        const double t = s * angle;
        return {origin[0] + radius * std::cos(t), origin[1] + radius * std::sin(t), origin[2] + pitch * t};
      }
    }
    return origin;
  }

  double arc_length() const {
    switch (kind) {
      case Kind::Line: return length;
      case Kind::Arc: return radius * angle;
      case Kind::Helix: return angle * std::sqrt(radius * radius + pitch * pitch);
    }
    return 0.0;
  }
  double chord() const {
    const Vec3 a = at(0.0), b = at(1.0);
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
  }
  double curvature() const {
    switch (kind) {
      case Kind::Line: return 0.0;
      case Kind::Arc: return 1.0 / radius;
      case Kind::Helix: return radius / (radius * radius + pitch * pitch);
    }
    return 0.0;
  }
  double tortuosity() const { return arc_length() / chord(); }

  /// Samples spaced at most `step_mm` apart along the curve, endpoints included.
  std::vector<Vec3> sample(double step_mm) const {
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(arc_length() / step_mm)));
    std::vector<Vec3> pts;
    pts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pts.push_back(at(static_cast<double>(i) / static_cast<double>(n)));
    return pts;
  }
};

namespace detail {

inline double dist2(const Vec3& a, const Vec3& b) {
  return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]);
}

inline double point_segment_dist2(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1] + (p[2] - a[2]) * ab[2]) / len2, 0.0, 1.0);
  return dist2(p, {a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]});
}

/// Grid of isotropic `spacing` whose voxel centers cover [lo, hi] plus `pad` mm.
inline Geometry covering_geometry(const Vec3& lo, const Vec3& hi, double pad, double spacing) {
  Geometry g;
  g.spacing = {spacing, spacing, spacing};
  for (int a = 0; a < 3; ++a) {
    g.origin[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] - pad;
    g.dims[static_cast<std::size_t>(a)] =
        static_cast<int>(std::ceil((hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)] + 2.0 * pad) / spacing)) + 1;
  }
  return g;
}

}  // namespace detail

/// Voxelized ellipsoid centered in its own grid: mask = voxel centers inside
/// the ellipsoid, volume = intensity_in there and intensity_out elsewhere.
inline std::pair<ScalarVolume, BinaryMask> ellipsoid_phantom(const Vec3& semi_axes, double spacing, double intensity_in,
                                                             double intensity_out, double pad_mm = 0.0) {
  if (spacing <= 0.0) throw Error(ErrorCode::InvalidArgument, "ellipsoid_phantom: spacing must be positive");
  for (double a : semi_axes)
    if (a <= 2.0 * spacing) throw Error(ErrorCode::TooSmall, "ellipsoid_phantom: semi-axis must exceed 2 voxels");
  const Vec3 lo{-semi_axes[0], -semi_axes[1], -semi_axes[2]};
  const Geometry g = detail::covering_geometry(lo, semi_axes, pad_mm + 2.0 * spacing, spacing);
  ScalarVolume v(g, intensity_out);
  BinaryMask m(g);
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x) {
        const Vec3 p = g.physical({x, y, z});
        const double e = (p[0] / semi_axes[0]) * (p[0] / semi_axes[0]) + (p[1] / semi_axes[1]) * (p[1] / semi_axes[1]) +
                         (p[2] / semi_axes[2]) * (p[2] / semi_axes[2]);
        if (e <= 1.0) {
          m(x, y, z) = 1;
          v(x, y, z) = intensity_in;
        }
      }
  return {std::move(v), std::move(m)};
}

/// Paints into `m` every voxel whose center lies within `radius` of the
/// polyline through `pts`.
inline void paint_tube(BinaryMask& m, const std::vector<Vec3>& pts, double radius) {
  const auto& g = m.geometry;
  const double r2 = radius * radius;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const Vec3& a = pts[s];
    const Vec3& b = pts[s + 1];
    Index3 lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double mn = std::min(a[ku], b[ku]) - radius, mx = std::max(a[ku], b[ku]) + radius;
      lo[ku] = std::max(0, static_cast<int>(std::floor((mn - g.origin[ku]) / g.spacing[ku])));
      hi[ku] = std::min(g.dims[ku] - 1, static_cast<int>(std::ceil((mx - g.origin[ku]) / g.spacing[ku])));
    }
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) {
          if (m(x, y, z)) continue;
          if (detail::point_segment_dist2(g.physical({x, y, z}), a, b) <= r2) m(x, y, z) = 1;
        }
  }
}

/// Tube of `radius` mm around `curve`, on an isotropic grid just covering it.
inline BinaryMask tube_phantom(const ParametricCurve& curve, double radius, double spacing) {
  if (spacing <= 0.0) throw Error(ErrorCode::InvalidArgument, "tube_phantom: spacing must be positive");
  if (radius < 1.5 * spacing) throw Error(ErrorCode::TooSmall, "tube_phantom: radius below 1.5 voxels");
  const double step = std::min(spacing, radius) * 0.25;
  const auto pts = curve.sample(step);

  // Points farther apart along the curve than a half turn around the tube
  // must stay more than a diameter apart in space.
  const double arc_gap = std::numbers::pi * radius;
  const double total = curve.arc_length();
  const double ds = total / static_cast<double>(pts.size() - 1);
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(radius / ds / 2.0));
  for (std::size_t i = 0; i < pts.size(); i += stride)
    for (std::size_t j = i + stride; j < pts.size(); j += stride) {
      double along = static_cast<double>(j - i) * ds;
      if (curve.closed()) along = std::min(along, total - along);
      if (along <= arc_gap) continue;
      if (detail::dist2(pts[i], pts[j]) <= 4.0 * radius * radius)
        throw Error(ErrorCode::SelfIntersection, "tube_phantom: curve comes within one tube diameter of itself");
    }

  Vec3 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts)
    for (std::size_t k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  BinaryMask m(detail::covering_geometry(lo, hi, radius + 2.0 * spacing, spacing));
  paint_tube(m, pts, radius);
  return m;
}

}  // namespace rqvt
