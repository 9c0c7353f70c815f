#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rqvt/ml/dataset.hpp"
#include "rqvt/ml/tree.hpp"

namespace rqvt::ml {

enum class ModelKind { RandomForest, GradientBoosting };

inline std::string to_string(ModelKind k) { return k == ModelKind::RandomForest ? "rf" : "gb"; }

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "rf") return ModelKind::RandomForest;
  if (s == "gb") return ModelKind::GradientBoosting;
  throw Error(ErrorCode::ConfigError, "unknown model kind '" + s + "' (expected rf or gb)");
}

struct ForestParams {
  int trees = 300;
  int features_per_split = 0;  // 0 = ceil(sqrt(cols))
  int min_leaf = 2;
  int max_depth = -1;          // unlimited
  int threads = 1;
};

struct BoostingParams {
  int stages = 200;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 1;
};

struct Model {
  ModelKind kind = ModelKind::RandomForest;
  std::vector<std::string> feature_ids;
  std::vector<Tree> trees;
  std::uint64_t seed = 0;
  ForestParams forest;
  BoostingParams boosting;
  double init_score = 0.0;  // boosting: log-odds of the training base rate
};

namespace detail {

inline void require_trainable(const Dataset& d) {
  d.validate();
  if (d.rows() < 2 || !d.has_both_classes())
    throw Error(ErrorCode::SingleClassDataset, "training data must contain both classes");
  if (d.cols() == 0) throw Error(ErrorCode::InvalidArgument, "training data has no feature columns");
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

/// Bootstrap-aggregated Gini trees. Tree t draws from its own stream seeded
/// by derive_seed(seed, t), so the result does not depend on thread count.
inline Model train_random_forest(const Dataset& d, const ForestParams& params = {}, std::uint64_t seed = 0) {
  detail::require_trainable(d);
  Model m;
  m.kind = ModelKind::RandomForest;
  m.feature_ids = d.feature_ids;
  m.seed = seed;
  m.forest = params;
  if (m.forest.features_per_split <= 0)
    m.forest.features_per_split = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d.cols()))));
  m.trees.resize(static_cast<std::size_t>(std::max(0, params.trees)));

  std::vector<double> target(d.labels.begin(), d.labels.end());
  const auto presorted = detail::presort(d);
  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> sample(d.rows());
    for (auto& s : sample) s = static_cast<std::size_t>(rng.below(d.rows()));
    std::sort(sample.begin(), sample.end());
    detail::TreeBuilder b(d, target, detail::Criterion::Gini, m.forest.max_depth, m.forest.min_leaf,
                          m.forest.features_per_split, static_cast<double>(sample.size()), &rng, &presorted);
    b.build(sample, 0);
    m.trees[t] = std::move(b.tree);
  };

  const int threads = std::max(1, std::min(params.threads, static_cast<int>(m.trees.size())));
  if (threads == 1) {
    for (std::size_t t = 0; t < m.trees.size(); ++t) grow(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = static_cast<std::size_t>(w); t < m.trees.size(); t += static_cast<std::size_t>(threads)) grow(t);
      });
    for (auto& th : pool) th.join();
  }
  return m;
}

/// Logistic-loss boosting: each stage fits a regression tree to the
/// residuals y - sigmoid(score) and adds learning_rate times its leaf means.
inline Model train_gradient_boosting(const Dataset& d, const BoostingParams& params = {}, std::uint64_t seed = 0) {
  detail::require_trainable(d);
  Model m;
  m.kind = ModelKind::GradientBoosting;
  m.feature_ids = d.feature_ids;
  m.seed = seed;
  m.boosting = params;
  double positives = 0.0;
  for (int y : d.labels) positives += y;
  const double base = positives / static_cast<double>(d.rows());
  m.init_score = std::log(base / (1.0 - base));

  std::vector<double> score(d.rows(), m.init_score), residual(d.rows());
  std::vector<std::size_t> all(d.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Rng rng(derive_seed(seed, 0));  // all features are scanned, so this stream is never drawn from
  const auto presorted = detail::presort(d);
  for (int s = 0; s < params.stages; ++s) {
    for (std::size_t i = 0; i < d.rows(); ++i) residual[i] = d.labels[i] - detail::sigmoid(score[i]);
    detail::TreeBuilder b(d, residual, detail::Criterion::SquaredError, params.max_depth, params.min_leaf, 0,
                          static_cast<double>(d.rows()), &rng, &presorted);
    b.build(all, 0);
    for (std::size_t i = 0; i < d.rows(); ++i) score[i] += params.learning_rate * b.tree.predict(d.row(i));
    m.trees.push_back(std::move(b.tree));
  }
  return m;
}

inline double predict_row(const Model& m, const double* x) {
  if (m.kind == ModelKind::RandomForest) {
    if (m.trees.empty()) return 0.5;
    double s = 0.0;
    for (const auto& t : m.trees) s += t.predict(x);
    return std::clamp(s / static_cast<double>(m.trees.size()), 0.0, 1.0);
  }
  double z = m.init_score;
  for (const auto& t : m.trees) z += m.boosting.learning_rate * t.predict(x);
  return detail::sigmoid(z);
}

inline std::vector<double> predict_proba(const Model& m, const Dataset& d) {
  if (d.cols() != m.feature_ids.size())
    throw Error(ErrorCode::WidthMismatch, "predict_proba: data has " + std::to_string(d.cols()) + " columns, model expects " +
                                              std::to_string(m.feature_ids.size()));
  std::vector<double> p(d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r) p[r] = predict_row(m, d.row(r));
  return p;
}

inline std::vector<double> predict_proba(const Model& m, const std::vector<double>& row) {
  if (row.size() != m.feature_ids.size()) throw Error(ErrorCode::WidthMismatch, "predict_proba: row width mismatch");
  return {predict_row(m, row.data())};
}

struct Importance {
  std::string feature_id;
  std::size_t index = 0;
  double weight = 0.0;
};

/// Per-feature importance weights in column order, summing to 1 (all zero
/// when no tree ever split).
inline std::vector<double> importance_weights(const Model& m) {
  std::vector<double> w(m.feature_ids.size(), 0.0);
  for (const auto& t : m.trees)
    for (std::size_t n = 0; n < t.size(); ++n)
      if (!t.is_leaf(n)) w[static_cast<std::size_t>(t.feature[n])] += t.gain[n];
  double total = 0.0;
  for (double v : w) total += v;
  if (total > 0.0)
    for (double& v : w) v /= total;
  return w;
}

inline std::vector<Importance> rank_importance(const std::vector<std::string>& ids, const std::vector<double>& weights) {
  std::vector<Importance> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], i, weights[i]});
  std::stable_sort(out.begin(), out.end(), [](const Importance& a, const Importance& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.index < b.index;
  });
  return out;
}

/// Impurity-decrease importance, descending, ties by column index.
inline std::vector<Importance> feature_importance(const Model& m) {
  return rank_importance(m.feature_ids, importance_weights(m));
}

}  // namespace rqvt::ml
