#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rqvt/error.hpp"

namespace rqvt {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Axis-aligned voxel lattice. Voxel (i,j,k) has its center at
/// origin + (i,j,k) * spacing; storage is x-fastest.
struct Geometry {
  Index3 dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }

  std::size_t linear(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * static_cast<std::size_t>(dims[1]) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(dims[0]) +
           static_cast<std::size_t>(x);
  }
  std::size_t linear(const Index3& p) const { return linear(p[0], p[1], p[2]); }

  Index3 unravel(std::size_t idx) const {
    const auto nx = static_cast<std::size_t>(dims[0]);
    const auto ny = static_cast<std::size_t>(dims[1]);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
            static_cast<int>(idx / (nx * ny))};
  }

  bool contains(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
  }
  bool contains(const Index3& p) const { return contains(p[0], p[1], p[2]); }

  Vec3 physical(const Index3& p) const {
    return {origin[0] + p[0] * spacing[0], origin[1] + p[1] * spacing[1],
            origin[2] + p[2] * spacing[2]};
  }

  bool valid() const {
    for (int a = 0; a < 3; ++a) {
      if (dims[a] <= 0 || !(spacing[a] > 0.0) || !std::isfinite(spacing[a]) ||
          !std::isfinite(origin[a]))
        return false;
    }
    return true;
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

inline bool same_geometry(const Geometry& a, const Geometry& b, double tol_mm = 1e-6) {
  for (int i = 0; i < 3; ++i) {
    if (a.dims[i] != b.dims[i]) return false;
    if (std::abs(a.spacing[i] - b.spacing[i]) > tol_mm) return false;
    if (std::abs(a.origin[i] - b.origin[i]) > tol_mm) return false;
  }
  return true;
}

inline void require_same_geometry(const Geometry& a, const Geometry& b, const char* what) {
  if (!same_geometry(a, b)) throw Error(ErrorCode::GeometryMismatch, what);
}

template <typename T>
struct Grid {
  Geometry geometry;
  std::vector<T> data;

  Grid() = default;
  explicit Grid(const Geometry& g, T fill = T{}) : geometry(g), data(g.voxel_count(), fill) {}

  const Index3& dims() const { return geometry.dims; }
  std::size_t size() const { return data.size(); }

  T& operator()(int x, int y, int z) { return data[geometry.linear(x, y, z)]; }
  const T& operator()(int x, int y, int z) const { return data[geometry.linear(x, y, z)]; }
  T& operator[](const Index3& p) { return data[geometry.linear(p)]; }
  const T& operator[](const Index3& p) const { return data[geometry.linear(p)]; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// CT intensities in HU.
using ScalarVolume = Grid<double>;

/// One byte per voxel (0/1) so masks stay addressable and cheap to copy.
using BinaryMask = Grid<std::uint8_t>;

inline std::size_t count_foreground(const BinaryMask& m) {
  std::size_t n = 0;
  for (auto v : m.data) n += v != 0;
  return n;
}

inline bool is_empty(const BinaryMask& m) {
  for (auto v : m.data)
    if (v) return false;
  return true;
}

inline BinaryMask mask_difference(const BinaryMask& a, const BinaryMask& b) {
  require_same_geometry(a.geometry, b.geometry, "mask_difference");
  BinaryMask out(a.geometry);
  for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = (a.data[i] && !b.data[i]) ? 1 : 0;
  return out;
}

inline BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_geometry(a.geometry, b.geometry, "mask_union");
  BinaryMask out(a.geometry);
  for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = (a.data[i] || b.data[i]) ? 1 : 0;
  return out;
}

inline BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_geometry(a.geometry, b.geometry, "mask_intersection");
  BinaryMask out(a.geometry);
  for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = (a.data[i] && b.data[i]) ? 1 : 0;
  return out;
}

/// Inclusive index bounds of the foreground; empty() when the mask has none.
struct BoundingBox {
  Index3 lo{0, 0, 0};
  Index3 hi{-1, -1, -1};
  bool empty() const { return hi[0] < lo[0]; }
  Index3 extent() const { return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1}; }
};

inline BoundingBox bounding_box(const BinaryMask& m) {
  BoundingBox box{{m.dims()[0], m.dims()[1], m.dims()[2]}, {-1, -1, -1}};
  const auto& g = m.geometry;
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x) {
        if (!m(x, y, z)) continue;
        const Index3 p{x, y, z};
        for (int a = 0; a < 3; ++a) {
          if (p[a] < box.lo[a]) box.lo[a] = p[a];
          if (p[a] > box.hi[a]) box.hi[a] = p[a];
        }
      }
  if (box.hi[0] < 0) return BoundingBox{};
  return box;
}

/// Copies the sub-grid [lo, lo + extent) into a new grid whose origin keeps
/// voxel centers at the same physical positions. Out-of-range cells take `fill`.
template <typename T>
Grid<T> crop(const Grid<T>& src, const Index3& lo, const Index3& extent, T fill = T{}) {
  Geometry g;
  g.dims = extent;
  g.spacing = src.geometry.spacing;
  for (int a = 0; a < 3; ++a) g.origin[a] = src.geometry.origin[a] + lo[a] * src.geometry.spacing[a];
  Grid<T> out(g, fill);
  for (int z = 0; z < extent[2]; ++z)
    for (int y = 0; y < extent[1]; ++y)
      for (int x = 0; x < extent[0]; ++x) {
        const int sx = x + lo[0], sy = y + lo[1], sz = z + lo[2];
        if (src.geometry.contains(sx, sy, sz)) out(x, y, z) = src(sx, sy, sz);
      }
  return out;
}

/// All 26 neighbor offsets in a fixed order (z-major, then y, then x).
inline const std::array<Index3, 26>& neighbors26() {
  static const std::array<Index3, 26> offsets = [] {
    std::array<Index3, 26> o{};
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx || dy || dz) o[n++] = {dx, dy, dz};
    return o;
  }();
  return offsets;
}

inline int offset_order(const Index3& d) { return std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2]); }

}  // namespace rqvt
