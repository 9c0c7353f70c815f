#pragma once

#include <array>
#include <vector>

#include "rqvt/volume.hpp"

namespace rqvt {

namespace detail {

// Cube positions 0..26 with index = (dz+1)*9 + (dy+1)*3 + (dx+1); 13 is the center.
struct CubeTables {
  std::array<std::vector<int>, 27> adj26;
  std::array<std::vector<int>, 27> adj6;
  std::array<bool, 27> in18{};
  std::array<bool, 27> face{};

  CubeTables() {
    auto coord = [](int i) { return Index3{i % 3 - 1, (i / 3) % 3 - 1, i / 9 - 1}; };
    for (int a = 0; a < 27; ++a) {
      const auto pa = coord(a);
      const int order = offset_order(pa);
      in18[static_cast<std::size_t>(a)] = a != 13 && order <= 2;
      face[static_cast<std::size_t>(a)] = order == 1;
      for (int b = 0; b < 27; ++b) {
        if (a == b) continue;
        const auto pb = coord(b);
        const Index3 d{pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]};
        if (std::abs(d[0]) > 1 || std::abs(d[1]) > 1 || std::abs(d[2]) > 1) continue;
        adj26[static_cast<std::size_t>(a)].push_back(b);
        if (offset_order(d) == 1) adj6[static_cast<std::size_t>(a)].push_back(b);
      }
    }
  }
};

inline const CubeTables& cube_tables() {
  static const CubeTables t;
  return t;
}

inline std::array<std::uint8_t, 27> neighborhood(const BinaryMask& m, const Index3& p) {
  std::array<std::uint8_t, 27> n{};
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Index3 q{p[0] + dx, p[1] + dy, p[2] + dz};
        n[static_cast<std::size_t>((dz + 1) * 9 + (dy + 1) * 3 + dx + 1)] = m.geometry.contains(q) ? m[q] : 0;
      }
  return n;
}

}  // namespace detail

/// Simple-point test for (26, 6) digital topology: the foreground in the
/// punctured 26-neighborhood is one 26-component and the background
/// 6-adjacent to the center is one 6-component within the 18-neighborhood.
inline bool is_simple_point(const std::array<std::uint8_t, 27>& n) {
  const auto& t = detail::cube_tables();
  std::array<int, 27> stack{};

  int fg_start = -1, fg_total = 0;
  for (int i = 0; i < 27; ++i)
    if (i != 13 && n[static_cast<std::size_t>(i)]) {
      ++fg_total;
      if (fg_start < 0) fg_start = i;
    }
  if (fg_total == 0) return false;  // isolated point
  {
    std::array<bool, 27> seen{};
    int top = 0, reached = 0;
    stack[static_cast<std::size_t>(top++)] = fg_start;
    seen[static_cast<std::size_t>(fg_start)] = true;
    while (top) {
      const int c = stack[static_cast<std::size_t>(--top)];
      ++reached;
      for (int b : t.adj26[static_cast<std::size_t>(c)])
        if (b != 13 && n[static_cast<std::size_t>(b)] && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = true;
          stack[static_cast<std::size_t>(top++)] = b;
        }
    }
    if (reached != fg_total) return false;
  }

  int bg_start = -1;
  int bg_faces = 0;
  for (int i = 0; i < 27; ++i)
    if (t.face[static_cast<std::size_t>(i)] && !n[static_cast<std::size_t>(i)]) {
      ++bg_faces;
      if (bg_start < 0) bg_start = i;
    }
  if (bg_faces == 0) return false;  // interior point
  std::array<bool, 27> seen{};
  int top = 0, faces_reached = 0;
  stack[static_cast<std::size_t>(top++)] = bg_start;
  seen[static_cast<std::size_t>(bg_start)] = true;
  while (top) {
    const int c = stack[static_cast<std::size_t>(--top)];
    if (t.face[static_cast<std::size_t>(c)]) ++faces_reached;
    for (int b : t.adj6[static_cast<std::size_t>(c)])
      if (t.in18[static_cast<std::size_t>(b)] && !n[static_cast<std::size_t>(b)] && !seen[static_cast<std::size_t>(b)]) {
        seen[static_cast<std::size_t>(b)] = true;
        stack[static_cast<std::size_t>(top++)] = b;
      }
  }
  return faces_reached == bg_faces;
}

inline int count_neighbors26(const BinaryMask& m, const Index3& p) {
  int n = 0;
  for (const auto& d : neighbors26()) {
    const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
    if (m.geometry.contains(q) && m[q]) ++n;
  }
  return n;
}

/// Directional thinning to a 1-voxel-wide, 26-connected curve skeleton.
/// Each pass peels border voxels facing -x, +x, -y, +y, -z, +z in that
/// order; a candidate is deleted only if it is still simple and not a curve
/// end (<= 1 neighbor) when visited, which preserves topology. Runs until a
/// full pass deletes nothing.
inline BinaryMask skeletonize(const BinaryMask& input) {
  BinaryMask m = input;
  const auto& g = m.geometry;
  static constexpr std::array<Index3, 6> faces{{{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.data[i]) active.push_back(i);

  std::vector<std::size_t> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& f : faces) {
      candidates.clear();
      for (auto idx : active) {
        if (!m.data[idx]) continue;
        const Index3 p = g.unravel(idx);
        const Index3 q{p[0] + f[0], p[1] + f[1], p[2] + f[2]};
        if (g.contains(q) && m[q]) continue;  // not a border voxel in this direction
        if (count_neighbors26(m, p) <= 1) continue;
        if (!is_simple_point(detail::neighborhood(m, p))) continue;
        candidates.push_back(idx);
      }
      for (auto idx : candidates) {
        const Index3 p = g.unravel(idx);
        if (count_neighbors26(m, p) <= 1) continue;
        if (!is_simple_point(detail::neighborhood(m, p))) continue;
        m.data[idx] = 0;
        changed = true;
      }
    }
    std::erase_if(active, [&](std::size_t idx) { return !m.data[idx]; });
  }
  return m;
}

}  // namespace rqvt
