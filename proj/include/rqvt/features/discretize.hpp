#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "rqvt/error.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

/// Fixed-bin-width discretization of the ROI. Voxels outside the ROI carry
/// level 0; inside, level = floor((x - roi_min) / bin_width) + 1.
struct GrayLevelVolume {
  Grid<int> levels;
  int ng = 0;
  double bin_width = 25.0;
  double roi_min = 0.0;

  const Geometry& geometry() const { return levels.geometry; }
  int level(const Index3& p) const { return geometry().contains(p) ? levels[p] : 0; }
};

inline constexpr double kDefaultBinWidth = 25.0;

inline int bin_level(double x, double roi_min, double bin_width) {
  return static_cast<int>(std::floor((x - roi_min) / bin_width)) + 1;
}

inline GrayLevelVolume discretize(const ScalarVolume& v, const BinaryMask& roi, double bin_width = kDefaultBinWidth) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::NonPositiveBinWidth, "bin width must be positive");
  require_same_geometry(v.geometry, roi.geometry, "discretize: volume and ROI");
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (roi.data[i]) lo = std::min(lo, v.data[i]);
  if (lo == std::numeric_limits<double>::infinity()) throw Error(ErrorCode::EmptyRoi, "discretize");

  GrayLevelVolume g{Grid<int>(v.geometry, 0), 0, bin_width, lo};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!roi.data[i]) continue;
    const int level = bin_level(v.data[i], lo, bin_width);
    g.levels.data[i] = level;
    g.ng = std::max(g.ng, level);
  }
  return g;
}

}  // namespace rqvt
