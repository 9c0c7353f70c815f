#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rqvt/ml/dataset.hpp"
#include "rqvt/ml/metrics.hpp"
#include "rqvt/ml/models.hpp"

namespace rqvt::ml {

using Trainer = std::function<Model(const Dataset&)>;

struct FoldResult {
  std::vector<std::string> test_patients;
  std::vector<std::size_t> test_rows;
  std::vector<double> scores;  // aligned with test_rows
  double auc = 0.0;
  std::vector<RocPoint> roc;
};

struct CvReport {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // population
  std::vector<Importance> importance;  // fold-averaged

  std::vector<double> aucs() const {
    std::vector<double> a;
    for (const auto& f : folds) a.push_back(f.auc);
    return a;
  }
};

/// Patients (sorted, then shuffled by `seed`) dealt round-robin into k folds.
inline std::vector<std::vector<std::string>> patient_folds(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold CV needs k >= 2");
  std::vector<std::string> patients = d.patient_ids;
  std::sort(patients.begin(), patients.end());
  patients.erase(std::unique(patients.begin(), patients.end()), patients.end());
  if (static_cast<int>(patients.size()) < k)
    throw Error(ErrorCode::InvalidArgument, "fewer patients (" + std::to_string(patients.size()) + ") than folds");
  Rng rng(derive_seed(seed, 0x6b666f6c64ULL));
  rng.shuffle(patients);
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < patients.size(); ++i) folds[i % static_cast<std::size_t>(k)].push_back(patients[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

/// Patient-level k-fold cross-validation: every lesion of a patient lands in
/// the same fold.
inline CvReport kfold_cv(const Dataset& d, int k, const Trainer& trainer, std::uint64_t seed) {
  d.validate();
  const auto folds = patient_folds(d, k, seed);
  std::map<std::string, int> fold_of;
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (const auto& p : folds[f]) fold_of[p] = static_cast<int>(f);

  CvReport report;
  report.k = k;
  report.seed = seed;
  std::vector<double> importance_sum(d.cols(), 0.0);
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t r = 0; r < d.rows(); ++r) (fold_of[d.patient_ids[r]] == f ? test : train).push_back(r);
    const Dataset tr = d.subset(train), te = d.subset(test);
    if (!tr.has_both_classes())
      throw Error(ErrorCode::FoldClassCollapse, "fold " + std::to_string(f) + ": training part has a single class (" +
                                                    std::to_string(train.size()) + " rows)");
    if (!te.has_both_classes())
      throw Error(ErrorCode::FoldClassCollapse, "fold " + std::to_string(f) + ": held-out part has a single class (" +
                                                    std::to_string(test.size()) + " rows)");
    const Model m = trainer(tr);
    FoldResult fr;
    fr.test_patients = folds[static_cast<std::size_t>(f)];
    fr.test_rows = test;
    fr.scores = predict_proba(m, te);
    fr.auc = roc_auc(fr.scores, te.labels);
    fr.roc = roc_curve(fr.scores, te.labels);
    const auto w = importance_weights(m);
    for (std::size_t c = 0; c < w.size(); ++c) importance_sum[c] += w[c];
    report.folds.push_back(std::move(fr));
  }

  double s = 0.0;
  for (const auto& fr : report.folds) s += fr.auc;
  report.mean_auc = s / k;
  double v = 0.0;
  for (const auto& fr : report.folds) v += (fr.auc - report.mean_auc) * (fr.auc - report.mean_auc);
  report.std_auc = std::sqrt(v / k);
  for (double& w : importance_sum) w /= k;
  report.importance = rank_importance(d.feature_ids, importance_sum);
  return report;
}

}  // namespace rqvt::ml
