#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/features/feature_vector.hpp"
#include "rqvt/vessel/branches.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

namespace detail {
inline double step_length(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}
}  // namespace detail

struct CurveParams {
  int curvature_window = 2;
  double smoothing_mm = 1.5;  // Gaussian sigma along the path; 0 keeps raw voxel centers
};

/// Gaussian smoothing along the path. The kernel is truncated symmetrically
/// to the distance from the nearer end, so endpoints stay fixed and straight
/// runs stay straight.
inline std::vector<Vec3> smooth_path(const std::vector<Vec3>& path, double sigma) {
  if (sigma <= 0.0 || path.size() < 3) return path;
  const int n = static_cast<int>(path.size());
  const int reach = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(reach) + 1);
  for (int k = 0; k <= reach; ++k) w[static_cast<std::size_t>(k)] = std::exp(-0.5 * k * k / (sigma * sigma));
  std::vector<Vec3> out(path.size());
  for (int i = 0; i < n; ++i) {
    const int h = std::min({reach, i, n - 1 - i});
    Vec3 acc{0.0, 0.0, 0.0};
    double total = 0.0;
    for (int k = -h; k <= h; ++k) {
      const double wk = w[static_cast<std::size_t>(std::abs(k))];
      const auto& p = path[static_cast<std::size_t>(i + k)];
      for (std::size_t a = 0; a < 3; ++a) acc[a] += wk * p[a];
      total += wk;
    }
    for (std::size_t a = 0; a < 3; ++a) out[static_cast<std::size_t>(i)][a] = acc[a] / total;
  }
  return out;
}

inline double path_length(const std::vector<Vec3>& path) {
  double s = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) s += detail::step_length(path[i], path[i - 1]);
  return s;
}

/// Menger curvature 4*Area / (|a||b||c|) of the triangle (a, b, c); 0 when
/// degenerate.
inline double menger_curvature(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 cr{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  const double twice_area = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
  const double la = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  const double lb = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double lc = std::sqrt((c[0] - b[0]) * (c[0] - b[0]) + (c[1] - b[1]) * (c[1] - b[1]) + (c[2] - b[2]) * (c[2] - b[2]));
  const double denom = la * lb * lc;
  if (denom <= 0.0 || twice_area <= 1e-12 * denom) return 0.0;
  return 2.0 * twice_area / denom;
}

/// Menger curvature at every point with a full window on both sides.
inline std::vector<double> curvature_profile(const std::vector<Vec3>& path, int window) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "curvature_profile: window must be >= 1");
  std::vector<double> kappa;
  const int n = static_cast<int>(path.size());
  for (int i = window; i + window < n; ++i)
    kappa.push_back(menger_curvature(path[static_cast<std::size_t>(i - window)], path[static_cast<std::size_t>(i)],
                                     path[static_cast<std::size_t>(i + window)]));
  return kappa;
}

inline std::vector<Vec3> branch_curve(const Branch& b, const CurveParams& params = {}) {
  return smooth_path(b.path, params.smoothing_mm / b.unit_mm);
}

inline std::vector<double> curvature_profile(const Branch& b, const CurveParams& params = {}) {
  return curvature_profile(branch_curve(b, params), params.curvature_window);
}

/// Geodesic over chord length. Throws ZeroChord for closed branches.
inline double branch_tortuosity(const Branch& b, const CurveParams& params = {}) {
  const double chord = b.chord_mm();
  if (b.closed || chord <= 1e-12) throw Error(ErrorCode::ZeroChord, "branch_tortuosity: closed branch");
  return std::max(1.0, path_length(branch_curve(b, params)) / chord);
}

/// Population mean, std, skewness and (non-excess) kurtosis; 0 for the
/// higher moments with fewer than 2 values or zero spread.
inline std::array<double, 4> summary_stats(const std::vector<double>& x) {
  if (x.empty()) return {0.0, 0.0, 0.0, 0.0};
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  if (x.size() < 2) return {mean, 0.0, 0.0, 0.0};
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 1e-24 * std::max(1.0, mean * mean)) return {mean, 0.0, 0.0, 0.0};
  return {mean, std::sqrt(m2), m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

inline const std::vector<std::string>& qvt_measure_names() {
  static const std::vector<std::string> names{"Tortuosity", "CurvMean", "CurvMax",  "CurvStd",
                                              "CurvTotal",  "Geodesic", "Chord",    "VoxelCount"};
  return names;
}

inline const std::vector<std::string>& qvt_feature_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& m : qvt_measure_names())
      for (const char* s : {"Mean", "Std", "Skew", "Kurt"}) v.push_back("qvt_" + m + "_" + s);
    v.push_back("qvt_BranchCount");
    v.push_back("qvt_FillFraction");
    return v;
  }();
  return ids;
}

inline constexpr std::size_t kQvtFeatureCount = 34;

/// Eight per-branch measures summarized over branches, plus branch count and
/// the fraction of the tree's bounding box occupied by vessel voxels.
/// Closed branches are left out of the tortuosity statistics and branches too
/// short for a curvature window out of the curvature statistics.
inline FeatureVector qvt_features(const SkeletonGraph& graph, const BinaryMask& vessels, const CurveParams& params = {}) {
  FeatureVector f;
  const auto& ids = qvt_feature_ids();
  if (graph.branches.empty()) {
    for (const auto& id : ids) f.push(id, 0.0);
    return f;
  }

  std::array<std::vector<double>, 8> measures;
  for (const auto& b : graph.branches) {
    const auto curve = branch_curve(b, params);
    const double geodesic = path_length(curve);
    const double chord = b.chord_mm();
    if (!b.closed && chord > 1e-12) measures[0].push_back(std::max(1.0, geodesic / chord));
    const auto kappa = curvature_profile(curve, params.curvature_window);
    if (!kappa.empty()) {
      const auto ks = summary_stats(kappa);
      measures[1].push_back(ks[0]);
      measures[2].push_back(*std::max_element(kappa.begin(), kappa.end()));
      measures[3].push_back(ks[1]);
      // Each sample stands for the arc between the midpoints to its neighbors.
      const int w = params.curvature_window;
      double total = 0.0;
      for (std::size_t k = 0; k < kappa.size(); ++k) {
        const std::size_t i = k + static_cast<std::size_t>(w);
        const double ds = 0.5 * (detail::step_length(curve[i], curve[i - 1]) + detail::step_length(curve[i + 1], curve[i]));
        total += kappa[k] * ds;
      }
      measures[4].push_back(total);
    }
    measures[5].push_back(geodesic);
    measures[6].push_back(chord);
    measures[7].push_back(static_cast<double>(b.voxels.size()));
  }

  std::size_t k = 0;
  for (const auto& m : measures)
    for (double s : summary_stats(m)) f.push(ids[k++], s);
  f.push(ids[k++], static_cast<double>(graph.branches.size()));

  double fill = 0.0;
  if (const auto box = bounding_box(vessels); !box.empty()) {
    const auto e = box.extent();
    fill = static_cast<double>(count_foreground(vessels)) / (static_cast<double>(e[0]) * e[1] * e[2]);
  }
  f.push(ids[k], fill);
  return f;
}

}  // namespace rqvt
