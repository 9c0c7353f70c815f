#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rqvt/features/discretize.hpp"
#include "rqvt/features/feature_vector.hpp"
#include "rqvt/features/texture_matrix.hpp"

namespace rqvt {

/// Below these, IMC2's exponent argument and MCC's second eigenvalue are
/// treated as exact zeros; both feed a square root that would otherwise
/// amplify rounding noise.
inline constexpr double kImc2ZeroArg = 1e-12;
inline constexpr double kMccZeroEigen = 1e-10;

/// Value substituted for NGTDM Coarseness when the denominator vanishes.
inline constexpr double kCoarsenessCap = 1e6;

inline const std::vector<std::string>& glcm_feature_names() {
  static const std::vector<std::string> n{
      "Autocorrelation", "JointAverage",    "ClusterProminence", "ClusterShade",      "ClusterTendency",
      "Contrast",        "Correlation",     "DifferenceAverage", "DifferenceEntropy", "DifferenceVariance",
      "JointEnergy",     "JointEntropy",    "Imc1",              "Imc2",              "Idm",
      "Idmn",            "Id",              "Idn",               "InverseVariance",   "MaximumProbability",
      "SumAverage",      "SumEntropy",      "SumSquares",        "MCC"};
  return n;
}

inline const std::vector<std::string>& glrlm_feature_names() {
  static const std::vector<std::string> n{"ShortRunEmphasis",
                                          "LongRunEmphasis",
                                          "GrayLevelNonUniformity",
                                          "GrayLevelNonUniformityNormalized",
                                          "RunLengthNonUniformity",
                                          "RunLengthNonUniformityNormalized",
                                          "RunPercentage",
                                          "GrayLevelVariance",
                                          "RunVariance",
                                          "RunEntropy",
                                          "LowGrayLevelRunEmphasis",
                                          "HighGrayLevelRunEmphasis",
                                          "ShortRunLowGrayLevelEmphasis",
                                          "ShortRunHighGrayLevelEmphasis",
                                          "LongRunLowGrayLevelEmphasis",
                                          "LongRunHighGrayLevelEmphasis"};
  return n;
}

inline const std::vector<std::string>& glszm_feature_names() {
  static const std::vector<std::string> n{"SmallAreaEmphasis",
                                          "LargeAreaEmphasis",
                                          "GrayLevelNonUniformity",
                                          "GrayLevelNonUniformityNormalized",
                                          "SizeZoneNonUniformity",
                                          "SizeZoneNonUniformityNormalized",
                                          "ZonePercentage",
                                          "GrayLevelVariance",
                                          "ZoneVariance",
                                          "ZoneEntropy",
                                          "LowGrayLevelZoneEmphasis",
                                          "HighGrayLevelZoneEmphasis",
                                          "SmallAreaLowGrayLevelEmphasis",
                                          "SmallAreaHighGrayLevelEmphasis",
                                          "LargeAreaLowGrayLevelEmphasis",
                                          "LargeAreaHighGrayLevelEmphasis"};
  return n;
}

inline const std::vector<std::string>& gldm_feature_names() {
  static const std::vector<std::string> n{"SmallDependenceEmphasis",
                                          "LargeDependenceEmphasis",
                                          "GrayLevelNonUniformity",
                                          "DependenceNonUniformityNormalized",
                                          "GrayLevelVariance",
                                          "DependenceVariance",
                                          "DependenceEntropy",
                                          "LowGrayLevelEmphasis",
                                          "HighGrayLevelEmphasis",
                                          "SmallDependenceLowGrayLevelEmphasis",
                                          "SmallDependenceHighGrayLevelEmphasis",
                                          "LargeDependenceLowGrayLevelEmphasis",
                                          "LargeDependenceHighGrayLevelEmphasis"};
  return n;
}

inline const std::vector<std::string>& ngtdm_feature_names() {
  static const std::vector<std::string> n{"Coarseness", "Contrast", "Busyness", "Complexity", "Strength"};
  return n;
}

/// Second-largest eigenvalue's square root of the GLCM "Q" matrix, via the
/// symmetric similarity transform D^-1/2 Q D^1/2 over present levels.
inline double glcm_mcc(const std::vector<int>& present, const Matrix2D& p, const std::vector<double>& px) {
  const auto k = static_cast<Eigen::Index>(present.size());
  if (k < 2) return 0.0;
  Eigen::MatrixXd s(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      const int i = present[static_cast<std::size_t>(a)], j = present[static_cast<std::size_t>(b)];
      double acc = 0.0;
      for (int c : present) acc += p(i, c) * p(j, c) / px[static_cast<std::size_t>(c)];
      s(a, b) = acc / std::sqrt(px[static_cast<std::size_t>(i)] * px[static_cast<std::size_t>(j)]);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  const double second = solver.eigenvalues()[k - 2];
  return second > kMccZeroEigen ? std::sqrt(second) : 0.0;
}

/// The 24 GLCM features of one direction from its symmetric count matrix.
inline std::array<double, 24> glcm_direction_features(const Matrix2D& counts, int ng) {
  const double total = counts.sum();
  Matrix2D p(counts.rows, counts.cols);
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = counts.values[i] / total;

  std::vector<double> px(static_cast<std::size_t>(ng), 0.0);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) px[static_cast<std::size_t>(i)] += p(i, j);
  std::vector<int> present;
  for (int i = 0; i < ng; ++i)
    if (px[static_cast<std::size_t>(i)] > 0.0) present.push_back(i);

  double mu = 0.0;
  for (int i : present) mu += (i + 1) * px[static_cast<std::size_t>(i)];
  double var = 0.0, hx = 0.0;
  for (int i : present) {
    const double pi = px[static_cast<std::size_t>(i)];
    var += (i + 1 - mu) * (i + 1 - mu) * pi;
    hx -= pi * std::log2(pi);
  }

  std::vector<double> psum(static_cast<std::size_t>(2 * ng + 1), 0.0), pdiff(static_cast<std::size_t>(ng), 0.0);
  double autocorr = 0.0, prom = 0.0, shade = 0.0, tend = 0.0, contrast = 0.0, energy = 0.0, hxy = 0.0,
         hxy1 = 0.0, idm = 0.0, idmn = 0.0, id = 0.0, idn = 0.0, maxp = 0.0, cross = 0.0;
  const double ng2 = static_cast<double>(ng) * ng;
  for (int a : present)
    for (int b : present) {
      const double v = p(a, b);
      if (v <= 0.0) continue;
      const double i = a + 1, j = b + 1;
      const double k = std::abs(i - j);
      const double c = i + j - 2.0 * mu;
      autocorr += v * i * j;
      cross += v * i * j;
      prom += c * c * c * c * v;
      shade += c * c * c * v;
      tend += c * c * v;
      contrast += k * k * v;
      energy += v * v;
      hxy -= v * std::log2(v);
      hxy1 -= v * std::log2(px[static_cast<std::size_t>(a)] * px[static_cast<std::size_t>(b)]);
      idm += v / (1.0 + k * k);
      idmn += v / (1.0 + k * k / ng2);
      id += v / (1.0 + k);
      idn += v / (1.0 + k / ng);
      maxp = std::max(maxp, v);
      psum[static_cast<std::size_t>(a + b + 2)] += v;
      pdiff[static_cast<std::size_t>(k)] += v;
    }
  double hxy2 = 0.0;
  for (int a : present)
    for (int b : present) {
      const double q = px[static_cast<std::size_t>(a)] * px[static_cast<std::size_t>(b)];
      hxy2 -= q * std::log2(q);
    }

  double diff_avg = 0.0, diff_ent = 0.0, inv_var = 0.0;
  for (int k = 0; k < ng; ++k) {
    const double v = pdiff[static_cast<std::size_t>(k)];
    if (v <= 0.0) continue;
    diff_avg += k * v;
    diff_ent -= v * std::log2(v);
    if (k > 0) inv_var += v / (static_cast<double>(k) * k);
  }
  double diff_var = 0.0;
  for (int k = 0; k < ng; ++k) {
    const double v = pdiff[static_cast<std::size_t>(k)];
    if (v > 0.0) diff_var += (k - diff_avg) * (k - diff_avg) * v;
  }
  double sum_avg = 0.0, sum_ent = 0.0;
  for (std::size_t k = 2; k < psum.size(); ++k) {
    const double v = psum[k];
    if (v <= 0.0) continue;
    sum_avg += static_cast<double>(k) * v;
    sum_ent -= v * std::log2(v);
  }

  const bool multi = present.size() >= 2;
  const double correlation = multi && var > 0.0 ? (cross - mu * mu) / var : 0.0;
  const double imc1 = multi && hx > 0.0 ? (hxy - hxy1) / hx : 0.0;
  double imc2 = 0.0;
  if (multi && hxy2 - hxy > kImc2ZeroArg) imc2 = std::sqrt(1.0 - std::exp(-2.0 * (hxy2 - hxy)));

  return {autocorr, mu,        prom,     shade,    tend,       contrast, correlation, diff_avg,
          diff_ent, diff_var,  energy,   hxy,      imc1,       imc2,     idm,         idmn,
          id,       idn,       inv_var,  maxp,     sum_avg,    sum_ent,  var,         glcm_mcc(present, p, px)};
}

namespace detail {

struct MatrixMarginals {
  double total = 0.0;
  std::vector<double> row, col;
};

inline MatrixMarginals marginals(const Matrix2D& m) {
  MatrixMarginals mm;
  mm.row.assign(static_cast<std::size_t>(m.rows), 0.0);
  mm.col.assign(static_cast<std::size_t>(m.cols), 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      const double v = m(i, j);
      mm.row[static_cast<std::size_t>(i)] += v;
      mm.col[static_cast<std::size_t>(j)] += v;
      mm.total += v;
    }
  return mm;
}

/// Shared body of the run-length, size-zone and dependence families:
/// `emphasis` terms indexed by (gray level i, column value j).
struct RunStyleFeatures {
  double small_emph, large_emph, gln, glnn, cnu, cnun, gl_var, col_var, entropy, low_gl, high_gl, small_low,
      small_high, large_low, large_high;
};

inline RunStyleFeatures run_style(const Matrix2D& m) {
  const auto mm = marginals(m);
  const double n = mm.total;
  RunStyleFeatures f{};
  double mu_i = 0.0, mu_j = 0.0;
  for (int i = 0; i < m.rows; ++i) {
    const double r = mm.row[static_cast<std::size_t>(i)];
    const double gi = i + 1.0;
    f.gln += r * r;
    f.low_gl += r / (gi * gi);
    f.high_gl += r * gi * gi;
    mu_i += r * gi;
  }
  for (int j = 0; j < m.cols; ++j) {
    const double c = mm.col[static_cast<std::size_t>(j)];
    const double gj = j + 1.0;
    f.cnu += c * c;
    f.small_emph += c / (gj * gj);
    f.large_emph += c * gj * gj;
    mu_j += c * gj;
  }
  mu_i /= n;
  mu_j /= n;
  for (int i = 0; i < m.rows; ++i) {
    const double gi = i + 1.0;
    for (int j = 0; j < m.cols; ++j) {
      const double v = m(i, j);
      if (v <= 0.0) continue;
      const double gj = j + 1.0;
      const double p = v / n;
      f.gl_var += p * (gi - mu_i) * (gi - mu_i);
      f.col_var += p * (gj - mu_j) * (gj - mu_j);
      f.entropy -= p * std::log2(p);
      f.small_low += v / (gi * gi * gj * gj);
      f.small_high += v * gi * gi / (gj * gj);
      f.large_low += v * gj * gj / (gi * gi);
      f.large_high += v * gi * gi * gj * gj;
    }
  }
  f.glnn = f.gln / (n * n);
  f.gln /= n;
  f.cnun = f.cnu / (n * n);
  f.cnu /= n;
  f.small_emph /= n;
  f.large_emph /= n;
  f.low_gl /= n;
  f.high_gl /= n;
  f.small_low /= n;
  f.small_high /= n;
  f.large_low /= n;
  f.large_high /= n;
  return f;
}

inline std::array<double, 16> glrlm_direction_features(const Matrix2D& m, double voxels) {
  const auto f = run_style(m);
  const double runs = m.sum();
  return {f.small_emph, f.large_emph, f.gln,     f.glnn,       f.cnu,        f.cnun,      runs / voxels, f.gl_var,
          f.col_var,    f.entropy,    f.low_gl, f.high_gl, f.small_low, f.small_high, f.large_low, f.large_high};
}

}  // namespace detail

inline std::array<double, 16> glszm_features(const Matrix2D& m, double voxels) {
  return detail::glrlm_direction_features(m, voxels);
}

inline std::array<double, 13> gldm_features(const Matrix2D& m) {
  const auto f = detail::run_style(m);
  return {f.small_emph, f.large_emph, f.gln,       f.cnun,       f.gl_var,    f.col_var,   f.entropy,
          f.low_gl,     f.high_gl,    f.small_low, f.small_high, f.large_low, f.large_high};
}

inline std::array<double, 5> ngtdm_features(const Matrix2D& m) {
  std::vector<int> present;
  double nvp = 0.0, s_total = 0.0;
  for (int i = 0; i < m.rows; ++i) {
    if (m(i, 0) > 0.0) present.push_back(i);
    nvp += m(i, 0);
    s_total += m(i, 1);
  }
  if (nvp <= 0.0) return {0.0, 0.0, 0.0, 0.0, 0.0};
  std::vector<double> p(static_cast<std::size_t>(m.rows), 0.0);
  double ps = 0.0;
  for (int i : present) {
    p[static_cast<std::size_t>(i)] = m(i, 0) / nvp;
    ps += p[static_cast<std::size_t>(i)] * m(i, 1);
  }
  const double coarseness = ps > 0.0 ? 1.0 / ps : kCoarsenessCap;

  const double ngp = static_cast<double>(present.size());
  double pair_sq = 0.0, busy_den = 0.0, complexity = 0.0, strength_num = 0.0;
  for (int a : present)
    for (int b : present) {
      const double pa = p[static_cast<std::size_t>(a)], pb = p[static_cast<std::size_t>(b)];
      const double i = a + 1.0, j = b + 1.0;
      pair_sq += pa * pb * (i - j) * (i - j);
      busy_den += std::abs(i * pa - j * pb);
      complexity += std::abs(i - j) * (pa * m(a, 1) + pb * m(b, 1)) / (pa + pb);
      strength_num += (pa + pb) * (i - j) * (i - j);
    }
  const double contrast = ngp > 1.0 ? pair_sq / (ngp * (ngp - 1.0)) * s_total / nvp : 0.0;
  const double busyness = busy_den > 0.0 ? ps / busy_den : 0.0;
  const double strength = s_total > 0.0 ? strength_num / s_total : 0.0;
  return {coarseness, contrast, busyness, complexity / nvp, strength};
}

/// Per-family results plus the intermediate matrices, for diagnostics/tests.
struct TextureResult {
  std::vector<Matrix2D> glcm, glrlm;
  Matrix2D glszm, gldm, ngtdm;
  FeatureVector features;
};

inline TextureResult texture_analysis(const GrayLevelVolume& g, const TextureParams& params = {}) {
  TextureResult r;
  r.glcm = texture_matrix(TextureKind::GLCM, g, params);
  r.glrlm = texture_matrix(TextureKind::GLRLM, g, params);
  r.glszm = texture_matrix(TextureKind::GLSZM, g, params).front();
  r.gldm = texture_matrix(TextureKind::GLDM, g, params).front();
  r.ngtdm = texture_matrix(TextureKind::NGTDM, g, params).front();

  double voxels = 0.0;
  for (int v : g.levels.data) voxels += v != 0;

  // Directions without any voxel pair are skipped; if none has pairs the
  // GLCM features are all 0.
  std::array<double, 24> glcm{};
  int used = 0;
  for (const auto& m : r.glcm) {
    if (m.sum() <= 0.0) continue;
    const auto f = glcm_direction_features(m, g.ng);
    for (std::size_t i = 0; i < f.size(); ++i) glcm[i] += f[i];
    ++used;
  }
  if (used > 0)
    for (auto& v : glcm) v /= used;
  const auto& gn = glcm_feature_names();
  for (std::size_t i = 0; i < glcm.size(); ++i) r.features.push("glcm_" + gn[i], glcm[i]);

  std::array<double, 16> glrlm{};
  for (const auto& m : r.glrlm) {
    const auto f = detail::glrlm_direction_features(m, voxels);
    for (std::size_t i = 0; i < f.size(); ++i) glrlm[i] += f[i];
  }
  for (auto& v : glrlm) v /= static_cast<double>(r.glrlm.size());
  const auto& rn = glrlm_feature_names();
  for (std::size_t i = 0; i < glrlm.size(); ++i) r.features.push("glrlm_" + rn[i], glrlm[i]);

  const auto glszm = glszm_features(r.glszm, voxels);
  const auto& sn = glszm_feature_names();
  for (std::size_t i = 0; i < glszm.size(); ++i) r.features.push("glszm_" + sn[i], glszm[i]);

  const auto gldm = gldm_features(r.gldm);
  const auto& dn = gldm_feature_names();
  for (std::size_t i = 0; i < gldm.size(); ++i) r.features.push("gldm_" + dn[i], gldm[i]);

  const auto ngtdm = ngtdm_features(r.ngtdm);
  const auto& nn = ngtdm_feature_names();
  for (std::size_t i = 0; i < ngtdm.size(); ++i) r.features.push("ngtdm_" + nn[i], ngtdm[i]);
  return r;
}

/// The 74 texture features: GLCM 24, GLRLM 16, GLSZM 16, GLDM 13, NGTDM 5.
inline FeatureVector texture_features(const GrayLevelVolume& g, const TextureParams& params = {}) {
  return texture_analysis(g, params).features;
}

}  // namespace rqvt
