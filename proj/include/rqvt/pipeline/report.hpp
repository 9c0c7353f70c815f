#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqvt/ml/cv.hpp"
#include "rqvt/ml/models.hpp"
#include "rqvt/pipeline/config.hpp"
#include "rqvt/pipeline/csv.hpp"
#include "rqvt/pipeline/feature_table.hpp"

namespace rqvt {

/// Trainer for `kind` with the model parameters of `cfg`.
inline ml::Trainer make_trainer(ml::ModelKind kind, const PipelineConfig& cfg, std::uint64_t seed) {
  if (kind == ml::ModelKind::RandomForest) {
    auto params = cfg.forest;
    params.threads = cfg.threads;
    return [params, seed](const ml::Dataset& d) { return ml::train_random_forest(d, params, seed); };
  }
  const auto params = cfg.boosting;
  return [params, seed](const ml::Dataset& d) { return ml::train_gradient_boosting(d, params, seed); };
}

inline nlohmann::ordered_json importance_json(const std::vector<ml::Importance>& imp, std::size_t top_n) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < imp.size() && i < top_n; ++i) {
    nlohmann::ordered_json e = {{"rank", i + 1}, {"feature_id", imp[i].feature_id}, {"weight", imp[i].weight}};
    if (const auto f = parse_feature_id(imp[i].feature_id)) {
      e["family"] = f->family;
      e["name"] = f->name;
      e["roi"] = f->roi;
      e["tp"] = f->tp;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

inline nlohmann::ordered_json cv_report_json(const ml::CvReport& r, const ml::Dataset& d, ml::ModelKind kind,
                                             FeatureProfile profile, std::size_t top_n) {
  auto folds = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    const auto& fr = r.folds[f];
    folds.push_back({{"fold", f}, {"auc", fr.auc}, {"test_rows", fr.test_rows.size()}, {"test_patients", fr.test_patients}});
  }
  std::size_t pos = 0;
  for (int y : d.labels) pos += static_cast<std::size_t>(y);
  return {{"model", ml::to_string(kind)},
          {"profile", to_string(profile)},
          {"k", r.k},
          {"seed", r.seed},
          {"rows", d.rows()},
          {"positives", pos},
          {"features", d.cols()},
          {"aucs", r.aucs()},
          {"mean_auc", r.mean_auc},
          {"std_auc", r.std_auc},
          {"folds", std::move(folds)},
          {"top_features", importance_json(r.importance, top_n)}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

/// fold,fpr,tpr,threshold; the first point of each fold has threshold inf.
inline std::string roc_csv(const ml::CvReport& r) {
  std::string s = "fold,fpr,tpr,threshold\n";
  for (std::size_t f = 0; f < r.folds.size(); ++f)
    for (const auto& p : r.folds[f].roc)
      s += std::to_string(f) + ',' + format_sig17(p.fpr) + ',' + format_sig17(p.tpr) + ',' + format_sig17(p.threshold) + '\n';
  return s;
}

/// Every feature, most important first.
inline std::string importance_csv(const std::vector<ml::Importance>& imp) {
  std::string s = "rank,feature_id,family,name,roi,tp,weight\n";
  for (std::size_t i = 0; i < imp.size(); ++i) {
    const auto f = parse_feature_id(imp[i].feature_id).value_or(FeatureName{});
    s += std::to_string(i + 1) + ',' + csv_field(imp[i].feature_id) + ',' + f.family + ',' + f.name + ',' + f.roi + ',' +
         f.tp + ',' + format_sig17(imp[i].weight) + '\n';
  }
  return s;
}

/// lesion_id,patient_id,label,score
inline std::string scores_csv(const ml::Dataset& d, const std::vector<double>& scores, const std::vector<bool>& labelled) {
  std::string s = "lesion_id,patient_id,label,score\n";
  for (std::size_t r = 0; r < d.rows(); ++r) {
    s += csv_field(d.lesion_ids[r]) + ',' + csv_field(d.patient_ids[r]) + ',';
    if (r >= labelled.size() || labelled[r]) s += std::to_string(d.labels[r]);
    s += ',' + format_sig17(scores[r]) + '\n';
  }
  return s;
}

}  // namespace rqvt
