#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/features/discretize.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

enum class TextureKind { GLCM, GLRLM, GLSZM, GLDM, NGTDM };

inline TextureKind parse_texture_kind(std::string_view s) {
  if (s == "GLCM" || s == "glcm") return TextureKind::GLCM;
  if (s == "GLRLM" || s == "glrlm") return TextureKind::GLRLM;
  if (s == "GLSZM" || s == "glszm") return TextureKind::GLSZM;
  if (s == "GLDM" || s == "gldm") return TextureKind::GLDM;
  if (s == "NGTDM" || s == "ngtdm") return TextureKind::NGTDM;
  throw Error(ErrorCode::UnknownKind, std::string(s));
}

/// Dense row-major matrix. Row r is gray level r + 1; for GLRLM/GLSZM/GLDM
/// column c is run length / zone size / dependence c + 1; for NGTDM the two
/// columns are {n_i, s_i}.
struct Matrix2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Matrix2D() = default;
  Matrix2D(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  double operator()(int r, int c) const {
    return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

struct TextureParams {
  int gldm_alpha = 0;
};

/// The 13 unique offsets of the 26-neighborhood at distance 1.
inline const std::array<Index3, 13>& texture_directions() {
  static const std::array<Index3, 13> dirs{{{1, 0, 0},
                                            {0, 1, 0},
                                            {0, 0, 1},
                                            {1, 1, 0},
                                            {1, -1, 0},
                                            {1, 0, 1},
                                            {1, 0, -1},
                                            {0, 1, 1},
                                            {0, 1, -1},
                                            {1, 1, 1},
                                            {1, 1, -1},
                                            {1, -1, 1},
                                            {1, -1, -1}}};
  return dirs;
}

namespace detail {

inline Index3 add(const Index3& a, const Index3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

inline Matrix2D glcm_direction(const GrayLevelVolume& g, const Index3& d) {
  Matrix2D m(g.ng, g.ng);
  const auto& geo = g.geometry();
  for (int z = 0; z < geo.dims[2]; ++z)
    for (int y = 0; y < geo.dims[1]; ++y)
      for (int x = 0; x < geo.dims[0]; ++x) {
        const int a = g.levels(x, y, z);
        if (!a) continue;
        const int b = g.level({x + d[0], y + d[1], z + d[2]});
        if (!b) continue;
        m(a - 1, b - 1) += 1.0;
        m(b - 1, a - 1) += 1.0;
      }
  return m;
}

inline Matrix2D glrlm_direction(const GrayLevelVolume& g, const Index3& d) {
  const auto& geo = g.geometry();
  std::vector<std::pair<int, int>> runs;  // (level, length)
  int longest = 1;
  for (int z = 0; z < geo.dims[2]; ++z)
    for (int y = 0; y < geo.dims[1]; ++y)
      for (int x = 0; x < geo.dims[0]; ++x) {
        const int a = g.levels(x, y, z);
        if (!a) continue;
        const Index3 p{x, y, z};
        if (g.level({x - d[0], y - d[1], z - d[2]}) == a) continue;  // not a run start
        int len = 1;
        Index3 q = add(p, d);
        while (g.level(q) == a) {
          ++len;
          q = add(q, d);
        }
        runs.emplace_back(a, len);
        longest = std::max(longest, len);
      }
  Matrix2D m(g.ng, longest);
  for (const auto& [level, len] : runs) m(level - 1, len - 1) += 1.0;
  return m;
}

inline Matrix2D glszm(const GrayLevelVolume& g) {
  const auto& geo = g.geometry();
  std::vector<std::uint8_t> seen(g.levels.size(), 0);
  std::vector<std::pair<int, std::size_t>> zones;
  std::size_t largest = 1;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < g.levels.size(); ++seed) {
    const int a = g.levels.data[seed];
    if (!a || seen[seed]) continue;
    std::size_t size = 0;
    seen[seed] = 1;
    stack.push_back(seed);
    while (!stack.empty()) {
      const auto cur = stack.back();
      stack.pop_back();
      ++size;
      const Index3 p = geo.unravel(cur);
      for (const auto& d : neighbors26()) {
        const Index3 q = add(p, d);
        if (!geo.contains(q)) continue;
        const auto qi = geo.linear(q);
        if (!seen[qi] && g.levels.data[qi] == a) {
          seen[qi] = 1;
          stack.push_back(qi);
        }
      }
    }
    zones.emplace_back(a, size);
    largest = std::max(largest, size);
  }
  Matrix2D m(g.ng, static_cast<int>(largest));
  for (const auto& [level, size] : zones) m(level - 1, static_cast<int>(size) - 1) += 1.0;
  return m;
}

inline Matrix2D gldm(const GrayLevelVolume& g, int alpha) {
  const auto& geo = g.geometry();
  Matrix2D m(g.ng, 27);
  int largest = 1;
  for (int z = 0; z < geo.dims[2]; ++z)
    for (int y = 0; y < geo.dims[1]; ++y)
      for (int x = 0; x < geo.dims[0]; ++x) {
        const int a = g.levels(x, y, z);
        if (!a) continue;
        int dep = 1;
        for (const auto& d : neighbors26()) {
          const int b = g.level({x + d[0], y + d[1], z + d[2]});
          if (b && std::abs(a - b) <= alpha) ++dep;
        }
        m(a - 1, dep - 1) += 1.0;
        largest = std::max(largest, dep);
      }
  Matrix2D out(g.ng, largest);
  for (int r = 0; r < g.ng; ++r)
    for (int c = 0; c < largest; ++c) out(r, c) = m(r, c);
  return out;
}

inline Matrix2D ngtdm(const GrayLevelVolume& g) {
  const auto& geo = g.geometry();
  Matrix2D m(g.ng, 2);
  for (int z = 0; z < geo.dims[2]; ++z)
    for (int y = 0; y < geo.dims[1]; ++y)
      for (int x = 0; x < geo.dims[0]; ++x) {
        const int a = g.levels(x, y, z);
        if (!a) continue;
        double sum = 0.0;
        int count = 0;
        for (const auto& d : neighbors26()) {
          const int b = g.level({x + d[0], y + d[1], z + d[2]});
          if (b) {
            sum += b;
            ++count;
          }
        }
        if (count == 0) continue;  // voxels without ROI neighbors are not counted
        m(a - 1, 0) += 1.0;
        m(a - 1, 1) += std::abs(a - sum / count);
      }
  return m;
}

}  // namespace detail

/// Builds the matrix family `kind`. GLCM and GLRLM return one matrix per
/// direction of texture_directions(); the other kinds return a single matrix.
/// GLCM matrices hold symmetrized, unnormalized pair counts.
inline std::vector<Matrix2D> texture_matrix(TextureKind kind, const GrayLevelVolume& g,
                                            const TextureParams& params = {}) {
  if (g.ng < 1) throw Error(ErrorCode::EmptyRoi, "texture_matrix: no gray levels");
  std::vector<Matrix2D> out;
  switch (kind) {
    case TextureKind::GLCM:
      for (const auto& d : texture_directions()) out.push_back(detail::glcm_direction(g, d));
      break;
    case TextureKind::GLRLM:
      for (const auto& d : texture_directions()) out.push_back(detail::glrlm_direction(g, d));
      break;
    case TextureKind::GLSZM: out.push_back(detail::glszm(g)); break;
    case TextureKind::GLDM: out.push_back(detail::gldm(g, params.gldm_alpha)); break;
    case TextureKind::NGTDM: out.push_back(detail::ngtdm(g)); break;
  }
  return out;
}

}  // namespace rqvt
