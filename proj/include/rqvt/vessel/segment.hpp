#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/roi.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

struct LungThresholdParams {
  double threshold_hu = -320.0;
  int keep_components = 2;
  double closing_radius_voxels = 2.0;
};

/// Threshold-based lung extraction: low-intensity voxels, minus components
/// touching the volume border (outside air), keeping the largest
/// `keep_components`, then a morphological closing.
inline BinaryMask lung_mask_threshold(const ScalarVolume& v, const LungThresholdParams& params = {}) {
  const auto& g = v.geometry;
  BinaryMask low(g);
  for (std::size_t i = 0; i < v.size(); ++i) low.data[i] = v.data[i] < params.threshold_hu ? 1 : 0;
  const auto cc = connected_components(low, 6);

  std::vector<std::uint8_t> touches(static_cast<std::size_t>(cc.count()) + 1, 0);
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x) {
        const bool border = x == 0 || y == 0 || z == 0 || x + 1 == g.dims[0] || y + 1 == g.dims[1] || z + 1 == g.dims[2];
        if (border) touches[static_cast<std::size_t>(cc.labels(x, y, z))] = 1;
      }

  std::vector<int> candidates;
  for (int k = 1; k <= cc.count(); ++k)
    if (!touches[static_cast<std::size_t>(k)]) candidates.push_back(k);
  if (candidates.empty()) throw Error(ErrorCode::NoLungFound, "no enclosed low-intensity region");
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return cc.sizes[static_cast<std::size_t>(a - 1)] > cc.sizes[static_cast<std::size_t>(b - 1)];
  });
  if (static_cast<int>(candidates.size()) > params.keep_components) candidates.resize(static_cast<std::size_t>(params.keep_components));

  std::vector<std::uint8_t> keep(static_cast<std::size_t>(cc.count()) + 1, 0);
  for (int k : candidates) keep[static_cast<std::size_t>(k)] = 1;
  BinaryMask lung(g);
  for (std::size_t i = 0; i < lung.size(); ++i) lung.data[i] = keep[static_cast<std::size_t>(cc.labels.data[i])];

  if (params.closing_radius_voxels > 0.0) {
    // Closing radius is in voxels, so run it on a unit-spacing lattice.
    BinaryMask unit = lung;
    unit.geometry.spacing = {1.0, 1.0, 1.0};
    unit = erode_mask(dilate_mask(unit, params.closing_radius_voxels), params.closing_radius_voxels);
    unit.geometry = g;
    lung = std::move(unit);
  }
  return lung;
}

/// Otsu threshold over the exact sorted sample: the returned value is the
/// smallest intensity of the upper class. nullopt when no split has positive
/// between-class variance (fewer than two distinct values).
inline std::optional<double> otsu_threshold(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  double best = 0.0;
  std::optional<double> threshold;
  double w0 = 0.0, s0 = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    w0 += 1.0;
    s0 += values[i];
    if (values[i + 1] == values[i]) continue;
    const double w1 = n - w0;
    const double mu0 = s0 / w0, mu1 = (total - s0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      threshold = values[i + 1];
    }
  }
  return threshold;
}

struct VesselSegmentation {
  enum class Mode { Otsu, Fixed } mode = Mode::Otsu;
  double fixed_threshold_hu = -400.0;
};

/// Vessels = lung voxels with intensity >= t, t from Otsu over in-lung
/// intensities or fixed.
inline BinaryMask segment_vessels(const ScalarVolume& v, const BinaryMask& lung, const VesselSegmentation& mode = {}) {
  require_same_geometry(v.geometry, lung.geometry, "segment_vessels");
  if (is_empty(lung)) throw Error(ErrorCode::EmptyLung, "segment_vessels");
  double t = mode.fixed_threshold_hu;
  if (mode.mode == VesselSegmentation::Mode::Otsu) {
    std::vector<double> inside;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (lung.data[i]) inside.push_back(v.data[i]);
    const auto otsu = otsu_threshold(std::move(inside));
    if (!otsu) return BinaryMask(v.geometry);
    t = *otsu;
  }
  BinaryMask out(v.geometry);
  for (std::size_t i = 0; i < v.size(); ++i) out.data[i] = (lung.data[i] && v.data[i] >= t) ? 1 : 0;
  return out;
}

/// Union of 26-connected vessel components that touch (are inside or
/// 26-adjacent to) the lesion, with lesion voxels removed.
inline BinaryMask lesion_attached_tree(const BinaryMask& vessels, const BinaryMask& lesion) {
  require_same_geometry(vessels.geometry, lesion.geometry, "lesion_attached_tree");
  const auto& g = vessels.geometry;
  const auto cc = connected_components(vessels, 26);
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(cc.count()) + 1, 0);
  for (std::size_t i = 0; i < vessels.size(); ++i) {
    const int label = cc.labels.data[i];
    if (!label || keep[static_cast<std::size_t>(label)]) continue;
    if (lesion.data[i]) {
      keep[static_cast<std::size_t>(label)] = 1;
      continue;
    }
    const Index3 p = g.unravel(i);
    for (const auto& d : neighbors26()) {
      const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
      if (g.contains(q) && lesion[q]) {
        keep[static_cast<std::size_t>(label)] = 1;
        break;
      }
    }
  }
  BinaryMask out(g);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data[i] = (keep[static_cast<std::size_t>(cc.labels.data[i])] && !lesion.data[i]) ? 1 : 0;
  return out;
}

}  // namespace rqvt
