#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rqvt/ml/dataset.hpp"

namespace rqvt::ml {

/// Flat binary tree. Internal nodes send x[feature] <= threshold left.
/// `gain` is the node's impurity decrease weighted by its share of the
/// training samples.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;
  std::vector<double> gain;

  std::size_t size() const { return feature.size(); }
  bool is_leaf(std::size_t n) const { return left[n] < 0; }

  int add_leaf(double v) {
    feature.push_back(-1);
    threshold.push_back(0.0);
    left.push_back(-1);
    right.push_back(-1);
    value.push_back(v);
    gain.push_back(0.0);
    return static_cast<int>(feature.size()) - 1;
  }

  double predict(const double* x) const {
    std::size_t n = 0;
    while (!is_leaf(n))
      n = static_cast<std::size_t>(x[feature[n]] <= threshold[n] ? left[n] : right[n]);
    return value[n];
  }

  int depth(std::size_t n = 0) const {
    if (is_leaf(n)) return 0;
    return 1 + std::max(depth(static_cast<std::size_t>(left[n])), depth(static_cast<std::size_t>(right[n])));
  }
};

namespace detail {

inline double split_threshold(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

// Classification: maximize -(n_l*gini_l + n_r*gini_r); equivalently the Gini
// decrease. Regression: maximize sum_l^2/n_l + sum_r^2/n_r (SSE decrease).
enum class Criterion { Gini, SquaredError };

struct TreeBuilder {
  const Dataset& d;
  const std::vector<double>& target;  // labels as 0/1 or residuals
  Criterion criterion;
  int max_depth;        // < 0 for unlimited
  int min_leaf;
  int features_per_split;  // <= 0 or >= cols for all
  double total_samples;
  Rng* rng;
  const std::vector<std::vector<std::uint32_t>>* presorted;  // row order per feature, optional
  Tree tree;

  TreeBuilder(const Dataset& data, const std::vector<double>& y, Criterion c, int depth_limit, int leaf_min,
              int mtry, double n_total, Rng* stream, const std::vector<std::vector<std::uint32_t>>* sorted = nullptr)
      : d(data), target(y), criterion(c), max_depth(depth_limit), min_leaf(leaf_min), features_per_split(mtry),
        total_samples(n_total), rng(stream), presorted(sorted) {}

  struct Entry {
    double x;
    double weight;
    double y;
  };
  std::vector<Entry> order;
  std::vector<int> candidates;
  std::vector<std::uint32_t> multiplicity;

  double node_impurity(const std::vector<std::size_t>& idx) const {
    const double n = static_cast<double>(idx.size());
    double s = 0.0, s2 = 0.0;
    for (auto i : idx) {
      s += target[i];
      s2 += target[i] * target[i];
    }
    if (criterion == Criterion::Gini) {
      const double p = s / n;
      return 2.0 * p * (1.0 - p);
    }
    return std::max(0.0, s2 / n - (s / n) * (s / n));
  }

  double leaf_value(const std::vector<std::size_t>& idx) const {
    double s = 0.0;
    for (auto i : idx) s += target[i];
    return s / static_cast<double>(idx.size());
  }

  // Fills `order` with the node's samples sorted by feature f. Large nodes
  // walk the presorted row order; small ones sort directly.
  void sorted_samples(const std::vector<std::size_t>& idx, int f) {
    order.clear();
    const auto fu = static_cast<std::size_t>(f);
    if (presorted && idx.size() * 8 >= d.rows()) {
      for (auto r : (*presorted)[fu]) {
        const auto c = multiplicity[r];
        if (c) order.push_back({d(r, fu), static_cast<double>(c), target[r]});
      }
      return;
    }
    for (auto i : idx) order.push_back({d(i, fu), 1.0, target[i]});
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) { return a.x < b.x; });
  }

  Split best_split(const std::vector<std::size_t>& idx) {
    const int cols = static_cast<int>(d.cols());
    candidates.resize(static_cast<std::size_t>(cols));
    std::iota(candidates.begin(), candidates.end(), 0);
    int m = cols;
    if (features_per_split > 0 && features_per_split < cols) {
      // Partial Fisher-Yates draw, then ascending order for index tie-breaks.
      for (int i = 0; i < features_per_split; ++i)
        std::swap(candidates[static_cast<std::size_t>(i)],
                  candidates[static_cast<std::size_t>(i) + rng->below(static_cast<std::uint64_t>(cols - i))]);
      m = features_per_split;
      std::sort(candidates.begin(), candidates.begin() + m);
    }

    if (presorted) {
      multiplicity.assign(d.rows(), 0);
      for (auto i : idx) ++multiplicity[i];
    }
    const double n = static_cast<double>(idx.size());
    double total = 0.0;
    for (auto i : idx) total += target[i];

    Split best;
    for (int ci = 0; ci < m; ++ci) {
      const int f = candidates[static_cast<std::size_t>(ci)];
      sorted_samples(idx, f);
      if (order.front().x == order.back().x) continue;
      double left_sum = 0.0, nl = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left_sum += order[k].weight * order[k].y;
        nl += order[k].weight;
        if (order[k].x == order[k + 1].x) continue;
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        double score;
        if (criterion == Criterion::Gini) {
          const double pl = left_sum / nl, pr = right_sum / nr;
          score = -(nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr));
        } else {
          score = left_sum * left_sum / nl + right_sum * right_sum / nr;
        }
        if (score > best.score) {
          best.feature = f;
          best.threshold = split_threshold(order[k].x, order[k + 1].x);
          best.score = score;
        }
      }
    }
    return best;
  }

  int build(const std::vector<std::size_t>& idx, int depth) {
    const double impurity = node_impurity(idx);
    const int node = tree.add_leaf(leaf_value(idx));
    if (impurity <= 1e-15) return node;
    if (max_depth >= 0 && depth >= max_depth) return node;
    if (static_cast<int>(idx.size()) < 2 * min_leaf) return node;

    const Split s = best_split(idx);
    if (s.feature < 0) return node;
    std::vector<std::size_t> li, ri;
    for (auto i : idx) (d(i, static_cast<std::size_t>(s.feature)) <= s.threshold ? li : ri).push_back(i);
    const double n = static_cast<double>(idx.size());
    const double decrease = n * impurity - static_cast<double>(li.size()) * node_impurity(li) -
                            static_cast<double>(ri.size()) * node_impurity(ri);

    const auto un = static_cast<std::size_t>(node);
    tree.feature[un] = s.feature;
    tree.threshold[un] = s.threshold;
    tree.gain[un] = std::max(0.0, decrease) / total_samples;
    const int l = build(li, depth + 1);
    tree.left[un] = l;
    const int r = build(ri, depth + 1);
    tree.right[un] = r;
    return node;
  }
};

/// Row indices sorted by each feature's value (stable by row).
inline std::vector<std::vector<std::uint32_t>> presort(const Dataset& d) {
  std::vector<std::vector<std::uint32_t>> out(d.cols());
  for (std::size_t c = 0; c < d.cols(); ++c) {
    auto& o = out[c];
    o.resize(d.rows());
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return d(a, c) < d(b, c); });
  }
  return out;
}

}  // namespace detail

}  // namespace rqvt::ml
