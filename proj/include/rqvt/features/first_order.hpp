#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/features/discretize.hpp"
#include "rqvt/features/feature_vector.hpp"
#include "rqvt/volume.hpp"

namespace rqvt {

/// Linear-interpolation percentile of sorted data (q in [0, 100]).
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

/// The 16 first-order statistics over raw ROI intensities. Entropy and
/// Uniformity use the fixed-bin-width histogram.
inline FeatureVector first_order_features(const ScalarVolume& v, const BinaryMask& roi,
                                          double bin_width = kDefaultBinWidth) {
  require_same_geometry(v.geometry, roi.geometry, "first_order_features");
  if (!(bin_width > 0.0)) throw Error(ErrorCode::NonPositiveBinWidth, "first_order_features");
  std::vector<double> x;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (roi.data[i]) x.push_back(v.data[i]);
  if (x.empty()) throw Error(ErrorCode::EmptyRoi, "first_order_features");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());

  double sum = 0.0, sum_sq = 0.0;
  for (double a : x) {
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, mad = 0.0;
  for (double a : x) {
    const double d = a - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    mad += std::abs(d);
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  mad /= n;
  if (x.front() == x.back()) m2 = m3 = m4 = mad = 0.0;
  const double skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  const double kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

  const double p10 = percentile_sorted(x, 10.0);
  const double p90 = percentile_sorted(x, 90.0);
  double rsum = 0.0;
  std::size_t rn = 0;
  for (double a : x)
    if (a >= p10 && a <= p90) {
      rsum += a;
      ++rn;
    }
  double rmad = 0.0;
  if (rn > 0) {
    const double rmean = rsum / static_cast<double>(rn);
    for (double a : x)
      if (a >= p10 && a <= p90) rmad += std::abs(a - rmean);
    rmad /= static_cast<double>(rn);
  }

  std::map<int, std::size_t> histogram;
  for (double a : x) ++histogram[bin_level(a, x.front(), bin_width)];
  double entropy = 0.0, uniformity = 0.0;
  for (const auto& [level, count] : histogram) {
    const double p = static_cast<double>(count) / n;
    entropy -= p * std::log2(p);
    uniformity += p * p;
  }

  FeatureVector f;
  f.push("firstorder_Minimum", x.front());
  f.push("firstorder_Maximum", x.back());
  f.push("firstorder_Mean", mean);
  f.push("firstorder_Median", percentile_sorted(x, 50.0));
  f.push("firstorder_Range", x.back() - x.front());
  f.push("firstorder_Variance", m2);
  f.push("firstorder_Skewness", skewness);
  f.push("firstorder_Kurtosis", kurtosis);
  f.push("firstorder_MeanAbsoluteDeviation", mad);
  f.push("firstorder_RobustMeanAbsoluteDeviation", rmad);
  f.push("firstorder_RootMeanSquared", std::sqrt(sum_sq / n));
  f.push("firstorder_Percentile10", p10);
  f.push("firstorder_Percentile90", p90);
  f.push("firstorder_InterquartileRange", percentile_sorted(x, 75.0) - percentile_sorted(x, 25.0));
  f.push("firstorder_Entropy", entropy);
  f.push("firstorder_Uniformity", uniformity);
  return f;
}

}  // namespace rqvt
