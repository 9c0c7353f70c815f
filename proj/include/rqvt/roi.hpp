#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

using DistanceField = Grid<double>;

namespace detail {

/// One pass of the separable exact squared-distance transform (lower envelope
/// of parabolas) along `axis`. `f` holds squared distances in mm²; +inf marks
/// "no site yet".
inline void edt_pass(std::vector<double>& f, const Geometry& g, int axis) {
  const double inf = std::numeric_limits<double>::infinity();
  const int n = g.dims[axis];
  const double s = g.spacing[axis];
  std::vector<double> line(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);

  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  for (int j = 0; j < g.dims[a2]; ++j) {
    for (int i = 0; i < g.dims[a1]; ++i) {
      Index3 p{};
      p[a1] = i;
      p[a2] = j;
      for (int q = 0; q < n; ++q) {
        p[axis] = q;
        line[static_cast<std::size_t>(q)] = f[g.linear(p)];
      }

      int k = -1;
      for (int q = 0; q < n; ++q) {
        const double fq = line[static_cast<std::size_t>(q)];
        if (fq == inf) continue;
        const double cq = fq + (s * q) * (s * q);
        while (k >= 0) {
          const int vk = v[static_cast<std::size_t>(k)];
          const double cv = line[static_cast<std::size_t>(vk)] + (s * vk) * (s * vk);
          const double inter = (cq - cv) / (2.0 * s * s * (q - vk));  // in index units
          if (inter <= z[static_cast<std::size_t>(k)]) {
            --k;
          } else {
            ++k;
            v[static_cast<std::size_t>(k)] = q;
            z[static_cast<std::size_t>(k)] = inter;
            z[static_cast<std::size_t>(k) + 1] = inf;
            break;
          }
        }
        if (k < 0) {
          k = 0;
          v[0] = q;
          z[0] = -inf;
          z[1] = inf;
        }
      }

      if (k < 0) {
        std::fill(out.begin(), out.end(), inf);
      } else {
        int m = 0;
        for (int q = 0; q < n; ++q) {
          while (z[static_cast<std::size_t>(m) + 1] < q) ++m;
          const int vm = v[static_cast<std::size_t>(m)];
          const double d = s * (q - vm);
          out[static_cast<std::size_t>(q)] = line[static_cast<std::size_t>(vm)] + d * d;
        }
      }
      for (int q = 0; q < n; ++q) {
        p[axis] = q;
        f[g.linear(p)] = out[static_cast<std::size_t>(q)];
      }
    }
  }
}

}  // namespace detail

/// Exact squared Euclidean distance (mm²) from every voxel center to the
/// nearest voxel center where `site` is true. All +inf when there is no site.
inline std::vector<double> squared_distance_to(const Geometry& g, const std::vector<std::uint8_t>& site) {
  std::vector<double> f(site.size());
  for (std::size_t i = 0; i < site.size(); ++i) f[i] = site[i] ? 0.0 : std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) detail::edt_pass(f, g, axis);
  return f;
}

/// Exact Euclidean distance (mm) to the nearest foreground voxel center.
inline DistanceField distance_map(const BinaryMask& m) {
  if (is_empty(m)) throw Error(ErrorCode::EmptyMask, "distance to an empty mask is undefined");
  DistanceField d(m.geometry);
  d.data = squared_distance_to(m.geometry, m.data);
  for (auto& x : d.data) x = std::sqrt(x);
  return d;
}

/// Metric dilation: foreground iff distance_map <= margin.
inline BinaryMask dilate_mask(const BinaryMask& m, double margin_mm) {
  if (!(margin_mm >= 0.0)) throw Error(ErrorCode::NegativeMargin, std::to_string(margin_mm));
  if (margin_mm == 0.0 || is_empty(m)) return m;
  const auto d = distance_map(m);
  BinaryMask out(m.geometry);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = d.data[i] <= margin_mm ? 1 : 0;
  return out;
}

/// Metric erosion: foreground voxels farther than `margin_mm` from every
/// background voxel center. The grid exterior is not treated as background.
inline BinaryMask erode_mask(const BinaryMask& m, double margin_mm) {
  if (!(margin_mm >= 0.0)) throw Error(ErrorCode::NegativeMargin, std::to_string(margin_mm));
  if (margin_mm == 0.0) return m;
  BinaryMask complement(m.geometry);
  for (std::size_t i = 0; i < m.size(); ++i) complement.data[i] = m.data[i] ? 0 : 1;
  if (is_empty(complement)) return m;
  const auto grown = dilate_mask(complement, margin_mm);
  BinaryMask out(m.geometry);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = grown.data[i] ? 0 : 1;
  return out;
}

enum class BandMode { Outer, Symmetric };

/// Peritumoral ROI. Outer: dilation minus the lesion. Symmetric additionally
/// includes lesion voxels within `margin_mm` of the background.
inline BinaryMask boundary_band(const BinaryMask& lesion, double margin_mm, BandMode mode = BandMode::Outer) {
  if (!(margin_mm > 0.0)) throw Error(ErrorCode::NegativeMargin, "band margin must be positive");
  if (is_empty(lesion)) throw Error(ErrorCode::EmptyLesion, "boundary band of an empty lesion");
  BinaryMask band = mask_difference(dilate_mask(lesion, margin_mm), lesion);
  if (mode == BandMode::Symmetric) band = mask_union(band, mask_difference(lesion, erode_mask(lesion, margin_mm)));
  return band;
}

struct LabeledComponents {
  Grid<int> labels;                 // 0 = background, 1..K
  std::vector<std::size_t> sizes;   // sizes[k-1] = voxel count of label k

  int count() const { return static_cast<int>(sizes.size()); }
};

inline std::vector<Index3> neighbor_offsets(int connectivity) {
  if (connectivity != 6 && connectivity != 18 && connectivity != 26)
    throw Error(ErrorCode::InvalidArgument, "connectivity must be 6, 18 or 26");
  const int max_order = connectivity == 6 ? 1 : connectivity == 18 ? 2 : 3;
  std::vector<Index3> out;
  for (const auto& d : neighbors26())
    if (offset_order(d) <= max_order) out.push_back(d);
  return out;
}

/// Components are numbered in order of their minimum linear voxel index.
inline LabeledComponents connected_components(const BinaryMask& m, int connectivity = 26) {
  const auto offsets = neighbor_offsets(connectivity);
  const auto& g = m.geometry;
  LabeledComponents out{Grid<int>(g, 0), {}};
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < m.size(); ++seed) {
    if (!m.data[seed] || out.labels.data[seed]) continue;
    const int label = out.count() + 1;
    std::size_t size = 0;
    out.labels.data[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const auto cur = stack.back();
      stack.pop_back();
      ++size;
      const Index3 p = g.unravel(cur);
      for (const auto& d : offsets) {
        const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
        if (!g.contains(q)) continue;
        const auto qi = g.linear(q);
        if (m.data[qi] && !out.labels.data[qi]) {
          out.labels.data[qi] = label;
          stack.push_back(qi);
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

/// Longest in-plane (axial) diameter in mm over all z-slices; 0 when empty.
inline double recist_diameter(const BinaryMask& m) {
  const auto& g = m.geometry;
  const double sx = g.spacing[0], sy = g.spacing[1];
  double best2 = 0.0;
  std::vector<std::pair<int, int>> boundary;
  for (int z = 0; z < g.dims[2]; ++z) {
    boundary.clear();
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x) {
        if (!m(x, y, z)) continue;
        // Extreme points of a pixel set lie on its 4-connected boundary.
        const bool interior = x > 0 && y > 0 && x + 1 < g.dims[0] && y + 1 < g.dims[1] && m(x - 1, y, z) &&
                              m(x + 1, y, z) && m(x, y - 1, z) && m(x, y + 1, z);
        if (!interior) boundary.emplace_back(x, y);
      }
    for (std::size_t i = 0; i < boundary.size(); ++i)
      for (std::size_t j = i + 1; j < boundary.size(); ++j) {
        const double dx = (boundary[i].first - boundary[j].first) * sx;
        const double dy = (boundary[i].second - boundary[j].second) * sy;
        best2 = std::max(best2, dx * dx + dy * dy);
      }
  }
  return std::sqrt(best2);
}

struct DiameterRecord {
  std::string lesion_id;
  int timepoint = 0;
  double diameter_mm = 0.0;
};

/// Fraction of the baseline diameter at or below which a lesion counts as shrunk.
inline constexpr double kResponseRatio = 0.7;

/// 1 iff some follow-up diameter is at most 70% of baseline (>= 30% shrinkage).
/// The comparison carries a 1e-12 relative slack so that an exact 30% shrink
/// is not lost to rounding of 0.7 * baseline.
inline int shrinkage_label(const DiameterRecord& baseline, const std::vector<DiameterRecord>& followups) {
  if (followups.empty()) throw Error(ErrorCode::NoFollowups, baseline.lesion_id);
  if (!(baseline.diameter_mm > 0.0)) throw Error(ErrorCode::ZeroBaselineDiameter, baseline.lesion_id);
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& f : followups) smallest = std::min(smallest, f.diameter_mm);
  return smallest <= kResponseRatio * baseline.diameter_mm * (1.0 + 1e-12) ? 1 : 0;
}

}  // namespace rqvt
