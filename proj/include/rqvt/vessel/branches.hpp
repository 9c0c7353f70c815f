#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "rqvt/roi.hpp"
#include "rqvt/vessel/skeleton.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

enum class NodeKind : std::uint8_t { None = 0, Isolated, Endpoint, Regular, Junction };

/// One skeleton branch: an ordered 26-connected voxel path between two nodes
/// (or around a node-free loop, in which case first == last).
struct Branch {
  std::vector<Index3> voxels;
  std::vector<Vec3> path;  // voxel centers in mm
  int start_node = -1;
  int end_node = -1;
  bool closed = false;
  double unit_mm = 1.0;  // smallest grid spacing, converts point counts to mm

  /// Sum of consecutive-point Euclidean steps along `path`.
  double geodesic_mm() const {
    double s = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const double dx = path[i][0] - path[i - 1][0], dy = path[i][1] - path[i - 1][1], dz = path[i][2] - path[i - 1][2];
      s += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    return s;
  }
  double chord_mm() const {
    if (path.size() < 2) return 0.0;
    const auto& a = path.front();
    const auto& b = path.back();
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
  }
};

struct SkeletonGraph {
  Grid<NodeKind> kinds;
  Grid<int> node_of;  // node id for endpoint/junction voxels, -1 otherwise
  int junction_count = 0;
  int endpoint_count = 0;
  int isolated_count = 0;
  int loop_count = 0;  // branches forming node-free cycles
  int component_count = 0;
  std::vector<Branch> branches;

  int node_count() const { return junction_count + endpoint_count; }
  /// Independent cycles of the branch multigraph (E - V + C); node-free loops
  /// contribute one anchor vertex each.
  int cycle_count() const {
    return static_cast<int>(branches.size()) - (node_count() + loop_count) + (component_count - isolated_count);
  }
};

namespace detail {

inline SkeletonGraph build_graph(const BinaryMask& skel) {
  const auto& g = skel.geometry;
  SkeletonGraph sg;
  sg.kinds = Grid<NodeKind>(g, NodeKind::None);
  sg.node_of = Grid<int>(g, -1);

  for (std::size_t i = 0; i < skel.size(); ++i) {
    if (!skel.data[i]) continue;
    const int n = count_neighbors26(skel, g.unravel(i));
    sg.kinds.data[i] = n == 0 ? NodeKind::Isolated : n == 1 ? NodeKind::Endpoint : n == 2 ? NodeKind::Regular : NodeKind::Junction;
  }

  // Junction clusters: 26-connected junction voxels, grown by regular voxels
  // whose two neighbors both lie in the same cluster.
  BinaryMask junction(g);
  for (std::size_t i = 0; i < skel.size(); ++i) junction.data[i] = sg.kinds.data[i] == NodeKind::Junction;
  auto clusters = connected_components(junction, 26);
  bool grown = true;
  while (grown) {
    grown = false;
    for (std::size_t i = 0; i < skel.size(); ++i) {
      if (sg.kinds.data[i] != NodeKind::Regular) continue;
      const Index3 p = g.unravel(i);
      int first = 0;
      bool same = true;
      for (const auto& d : neighbors26()) {
        const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
        if (!g.contains(q) || !skel[q]) continue;
        const int c = clusters.labels[q];
        if (c == 0 || (first && c != first)) {
          same = false;
          break;
        }
        first = c;
      }
      if (same && first) {
        sg.kinds.data[i] = NodeKind::Junction;
        clusters.labels.data[i] = first;
        grown = true;
      }
    }
  }

  sg.junction_count = clusters.count();
  for (std::size_t i = 0; i < skel.size(); ++i)
    if (sg.kinds.data[i] == NodeKind::Junction) sg.node_of.data[i] = clusters.labels.data[i] - 1;
  int next_node = sg.junction_count;
  for (std::size_t i = 0; i < skel.size(); ++i) {
    if (sg.kinds.data[i] == NodeKind::Endpoint) {
      sg.node_of.data[i] = next_node++;
      ++sg.endpoint_count;
    } else if (sg.kinds.data[i] == NodeKind::Isolated) {
      ++sg.isolated_count;
    }
  }

  auto is_node = [&](std::size_t i) {
    return sg.kinds.data[i] == NodeKind::Endpoint || sg.kinds.data[i] == NodeKind::Junction;
  };
  auto make_branch = [&](const std::vector<std::size_t>& idx) {
    Branch b;
    for (auto i : idx) {
      const Index3 p = g.unravel(i);
      b.voxels.push_back(p);
      b.path.push_back(g.physical(p));
    }
    b.start_node = sg.node_of.data[idx.front()];
    b.end_node = sg.node_of.data[idx.back()];
    b.closed = idx.front() == idx.back();
    b.unit_mm = std::min({g.spacing[0], g.spacing[1], g.spacing[2]});
    return b;
  };

  std::vector<std::uint8_t> visited(skel.size(), 0);
  std::set<std::pair<std::size_t, std::size_t>> direct;
  for (std::size_t i = 0; i < skel.size(); ++i) {
    if (!skel.data[i] || !is_node(i)) continue;
    const Index3 p = g.unravel(i);
    for (const auto& d : neighbors26()) {
      const Index3 q{p[0] + d[0], p[1] + d[1], p[2] + d[2]};
      if (!g.contains(q) || !skel[q]) continue;
      const auto qi = g.linear(q);
      if (is_node(qi)) {
        if (sg.node_of.data[qi] == sg.node_of.data[i]) continue;
        // Two distinct nodes touching directly form a two-voxel branch. Only
        // one voxel pair per node pair is used.
        const auto key = std::minmax(sg.node_of.data[i], sg.node_of.data[qi]);
        if (direct.insert({static_cast<std::size_t>(key.first), static_cast<std::size_t>(key.second)}).second)
          sg.branches.push_back(make_branch({i, qi}));
        continue;
      }
      if (visited[qi]) continue;
      std::vector<std::size_t> walk{i, qi};
      visited[qi] = 1;
      std::size_t prev = i, cur = qi;
      while (true) {
        std::size_t next = cur;
        const Index3 c = g.unravel(cur);
        for (const auto& e : neighbors26()) {
          const Index3 r{c[0] + e[0], c[1] + e[1], c[2] + e[2]};
          if (!g.contains(r) || !skel[r]) continue;
          const auto ri = g.linear(r);
          if (ri == prev) continue;
          // Stay off voxels of the node we left unless it is the only way on.
          if (is_node(ri) && walk.size() == 2 && sg.node_of.data[ri] == sg.node_of.data[i] && ri != i) continue;
          next = ri;
          break;
        }
        if (next == cur) break;  // dead end (cannot happen for a valid regular chain)
        walk.push_back(next);
        if (is_node(next)) break;
        if (visited[next]) break;
        visited[next] = 1;
        prev = cur;
        cur = next;
      }
      sg.branches.push_back(make_branch(walk));
    }
  }

  // Node-free loops.
  for (std::size_t i = 0; i < skel.size(); ++i) {
    if (sg.kinds.data[i] != NodeKind::Regular || visited[i]) continue;
    std::vector<std::size_t> walk{i};
    visited[i] = 1;
    std::size_t prev = i, cur = i;
    while (true) {
      std::size_t next = cur;
      const Index3 c = g.unravel(cur);
      for (const auto& e : neighbors26()) {
        const Index3 r{c[0] + e[0], c[1] + e[1], c[2] + e[2]};
        if (!g.contains(r) || !skel[r]) continue;
        const auto ri = g.linear(r);
        if (ri == prev || (ri == i && walk.size() < 3)) continue;
        next = ri;
        break;
      }
      if (next == cur) break;
      walk.push_back(next);
      if (next == i || visited[next]) break;
      visited[next] = 1;
      prev = cur;
      cur = next;
    }
    sg.branches.push_back(make_branch(walk));
    ++sg.loop_count;
  }

  sg.component_count = connected_components(skel, 26).count();
  return sg;
}

}  // namespace detail

/// Classifies skeleton voxels by 26-neighbor count, merges adjacent junction
/// voxels into single nodes, and splits the skeleton into branches. Spurs
/// (endpoint-to-junction branches with fewer than `min_spur` voxels beyond
/// the junction) are removed once; the remainder is re-thinned so that
/// junction voxels left over from the spur become regular, and the graph is
/// rebuilt.
inline SkeletonGraph branch_decompose(const BinaryMask& skeleton, int min_spur = 3) {
  auto graph = detail::build_graph(skeleton);
  if (min_spur <= 0) return graph;

  BinaryMask pruned = skeleton;
  bool any = false;
  for (const auto& b : graph.branches) {
    if (b.closed || b.voxels.size() < 2) continue;
    const auto& g = skeleton.geometry;
    const auto kind_a = graph.kinds[b.voxels.front()];
    const auto kind_b = graph.kinds[b.voxels.back()];
    const bool spur = (kind_a == NodeKind::Endpoint && kind_b == NodeKind::Junction) ||
                      (kind_a == NodeKind::Junction && kind_b == NodeKind::Endpoint);
    if (!spur) continue;
    const int beyond = static_cast<int>(b.voxels.size()) - 1;
    if (beyond >= min_spur) continue;
    for (const auto& p : b.voxels)
      if (graph.kinds[p] != NodeKind::Junction) pruned.data[g.linear(p)] = 0;
    any = true;
  }
  if (!any) return graph;
  return detail::build_graph(skeletonize(pruned));
}

}  // namespace rqvt
