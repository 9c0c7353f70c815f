#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "rqvt/error.hpp"
#include "rqvt/features/feature_vector.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

namespace detail {

/// Mask smoothed by a separable binomial [1 4 6 4 1]/16 kernel on a grid
/// padded by 3 voxels of background on every side.
inline Grid<double> smoothed_indicator(const BinaryMask& m, const BoundingBox& box, int pad) {
  Index3 lo{}, ext{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = box.lo[a] - pad;
    ext[a] = box.hi[a] - box.lo[a] + 1 + 2 * pad;
  }
  const auto cropped = crop(m, lo, ext, std::uint8_t{0});
  Grid<double> s(cropped.geometry, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = cropped.data[i] ? 1.0 : 0.0;

  static constexpr std::array<double, 5> k{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  Grid<double> tmp(s.geometry, 0.0);
  for (int axis = 0; axis < 3; ++axis) {
    const auto& g = s.geometry;
    for (int z = 0; z < g.dims[2]; ++z)
      for (int y = 0; y < g.dims[1]; ++y)
        for (int x = 0; x < g.dims[0]; ++x) {
          double acc = 0.0;
          for (int t = -2; t <= 2; ++t) {
            Index3 q{x, y, z};
            q[axis] += t;
            if (g.contains(q)) acc += k[static_cast<std::size_t>(t + 2)] * s[q];
          }
          tmp(x, y, z) = acc;
        }
    std::swap(s.data, tmp.data);
  }
  return s;
}

}  // namespace detail

/// Surface area (mm²) of the mask from its boundary faces. Each face is
/// weighted by 1 / (|nx| + |ny| + |nz|), with n the unit normal estimated
/// from the gradient of the smoothed mask, so the staircase overcount of
/// oblique surfaces cancels.
inline double surface_area(const BinaryMask& m) {
  const auto box = bounding_box(m);
  if (box.empty()) return 0.0;
  constexpr int pad = 3;
  const auto s = detail::smoothed_indicator(m, box, pad);
  const auto& sg = s.geometry;
  const Vec3 sp = m.geometry.spacing;
  const std::array<double, 3> face_area{sp[1] * sp[2], sp[0] * sp[2], sp[0] * sp[1]};

  auto gradient = [&](const Index3& p) {
    Vec3 grad{};
    for (int a = 0; a < 3; ++a) {
      Index3 lo = p, hi = p;
      lo[a] -= 1;
      hi[a] += 1;
      const double vlo = sg.contains(lo) ? s[lo] : 0.0;
      const double vhi = sg.contains(hi) ? s[hi] : 0.0;
      grad[a] = (vhi - vlo) / (2.0 * sp[a]);
    }
    return grad;
  };

  double area = 0.0;
  const auto& g = m.geometry;
  for (int z = box.lo[2]; z <= box.hi[2]; ++z)
    for (int y = box.lo[1]; y <= box.hi[1]; ++y)
      for (int x = box.lo[0]; x <= box.hi[0]; ++x) {
        if (!m(x, y, z)) continue;
        for (int a = 0; a < 3; ++a)
          for (int dir = -1; dir <= 1; dir += 2) {
            Index3 q{x, y, z};
            q[a] += dir;
            if (g.contains(q) && m[q]) continue;
            const Index3 ps{x - box.lo[0] + pad, y - box.lo[1] + pad, z - box.lo[2] + pad};
            Index3 qs = ps;
            qs[a] += dir;
            const Vec3 g1 = gradient(ps), g2 = gradient(qs);
            const Vec3 n{g1[0] + g2[0], g1[1] + g2[1], g1[2] + g2[2]};
            const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            double weight = 1.0;
            if (norm > 0.0) weight = norm / (std::abs(n[0]) + std::abs(n[1]) + std::abs(n[2]));
            area += face_area[static_cast<std::size_t>(a)] * weight;
          }
      }
  return area;
}

/// Eigenvalues (descending) of the population covariance of voxel-center
/// coordinates in mm.
inline std::array<double, 3> principal_moments(const BinaryMask& m) {
  const auto& g = m.geometry;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x)
        if (m(x, y, z)) {
          mean += Eigen::Vector3d(x * g.spacing[0], y * g.spacing[1], z * g.spacing[2]);
          ++n;
        }
  if (n == 0) throw Error(ErrorCode::EmptyRoi, "principal moments of an empty mask");
  mean /= static_cast<double>(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x)
        if (m(x, y, z)) {
          const Eigen::Vector3d d = Eigen::Vector3d(x * g.spacing[0], y * g.spacing[1], z * g.spacing[2]) - mean;
          cov += d * d.transpose();
        }
  cov /= static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  const auto ev = solver.eigenvalues();  // ascending
  return {std::max(ev[2], 0.0), std::max(ev[1], 0.0), std::max(ev[0], 0.0)};
}

inline double sphericity(const BinaryMask& m) {
  const double volume = static_cast<double>(count_foreground(m)) * m.geometry.spacing[0] *
                        m.geometry.spacing[1] * m.geometry.spacing[2];
  const double area = surface_area(m);
  if (area <= 0.0) return 0.0;
  return std::cbrt(36.0 * std::numbers::pi * volume * volume) / area;
}

/// Sphericity, Elongation, Flatness. Throws DegenerateGeometry for ROIs
/// without three independent principal axes.
inline FeatureVector shape_features(const BinaryMask& m) {
  if (is_empty(m)) throw Error(ErrorCode::EmptyRoi, "shape_features");
  const auto lambda = principal_moments(m);
  if (count_foreground(m) < 4 || !(lambda[2] > 1e-12 * lambda[0]))
    throw Error(ErrorCode::DegenerateGeometry, "ROI is coplanar or collinear");
  FeatureVector f;
  f.push("shape_Sphericity", sphericity(m));
  f.push("shape_Elongation", std::sqrt(lambda[1] / lambda[0]));
  f.push("shape_Flatness", std::sqrt(lambda[2] / lambda[0]));
  return f;
}

/// Same features for any nonempty ROI: axis ratios of a degenerate ROI fall
/// back to the ratios of whatever moments exist (0 when the ROI is a point).
inline FeatureVector shape_features_guarded(const BinaryMask& m) {
  if (is_empty(m)) throw Error(ErrorCode::EmptyRoi, "shape_features");
  const auto lambda = principal_moments(m);
  FeatureVector f;
  f.push("shape_Sphericity", sphericity(m));
  f.push("shape_Elongation", lambda[0] > 0.0 ? std::sqrt(lambda[1] / lambda[0]) : 0.0);
  f.push("shape_Flatness", lambda[0] > 0.0 ? std::sqrt(lambda[2] / lambda[0]) : 0.0);
  return f;
}

}  // namespace rqvt
