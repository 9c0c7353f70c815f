#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rqvt/features/feature_vector.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

inline constexpr int kFractalScales = 10;

/// Occupied-box counts N(2^j), j = 0..10, for boxes anchored at index 0.
inline std::array<double, kFractalScales + 1> box_counts(const BinaryMask& m) {
  std::array<double, kFractalScales + 1> counts{};
  Index3 dims = m.geometry.dims;
  std::vector<std::uint8_t> level(m.data.begin(), m.data.end());
  for (int j = 0;; ++j) {
    std::size_t n = 0;
    for (auto v : level) n += v ? 1 : 0;
    counts[static_cast<std::size_t>(j)] = static_cast<double>(n);
    if (j == kFractalScales) break;
    // OR-pool 2x2x2 blocks into the next level.
    const Index3 next{(dims[0] + 1) / 2, (dims[1] + 1) / 2, (dims[2] + 1) / 2};
    std::vector<std::uint8_t> pooled(static_cast<std::size_t>(next[0]) * next[1] * next[2], 0);
    for (int z = 0; z < dims[2]; ++z)
      for (int y = 0; y < dims[1]; ++y) {
        const std::size_t row = (static_cast<std::size_t>(z) * dims[1] + y) * dims[0];
        const std::size_t out_row = (static_cast<std::size_t>(z / 2) * next[1] + y / 2) * next[0];
        for (int x = 0; x < dims[0]; ++x)
          if (level[row + x]) pooled[out_row + x / 2] = 1;
      }
    level = std::move(pooled);
    dims = next;
  }
  return counts;
}

inline const std::vector<std::string>& fractal_feature_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (int k = 1; k <= kFractalScales; ++k) v.push_back("fractal_FD_r" + std::to_string(1 << k));
    return v;
  }();
  return ids;
}

/// Local box-counting dimension between consecutive dyadic box sizes:
/// fd_k = log2(N(2^(k-1)) / N(2^k)), k = 1..10. Empty mask gives zeros.
inline FeatureVector fractal_dimensions(const BinaryMask& m) {
  const auto n = box_counts(m);
  FeatureVector f;
  const auto& ids = fractal_feature_ids();
  for (int k = 1; k <= kFractalScales; ++k) {
    const double fine = n[static_cast<std::size_t>(k - 1)], coarse = n[static_cast<std::size_t>(k)];
    f.push(ids[static_cast<std::size_t>(k - 1)], coarse > 0.0 ? std::log2(fine / coarse) : 0.0);
  }
  return f;
}

}  // namespace rqvt
