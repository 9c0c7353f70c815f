#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "rqvt/error.hpp"

namespace rqvt::ml {

namespace detail {

inline void check_scored(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::InvalidArgument, "scores and labels differ in length");
  bool zero = false, one = false;
  for (int y : labels) (y ? one : zero) = true;
  if (!zero || !one) throw Error(ErrorCode::SingleClassLabels, "AUC needs both classes");
}

}  // namespace detail

/// Mann-Whitney AUC with ties credited one half, via midranks.
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  detail::check_scored(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum += midrank;
    i = j;
  }
  for (int y : labels) pos += y;
  const double neg = static_cast<double>(n) - pos;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score >= threshold predicts positive
};

/// ROC curve over distinct score thresholds, from (0,0) at +inf to (1,1).
inline std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  detail::check_scored(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double pos = 0.0;
  for (int y : labels) pos += y;
  const double neg = static_cast<double>(labels.size()) - pos;
  std::vector<RocPoint> pts{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1.0;
      ++j;
    }
    pts.push_back({fp / neg, tp / pos, scores[order[i]]});
    i = j;
  }
  return pts;
}

/// Trapezoidal area under a ROC curve.
inline double roc_area(const std::vector<RocPoint>& pts) {
  double a = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) a += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
  return a;
}

}  // namespace rqvt::ml
