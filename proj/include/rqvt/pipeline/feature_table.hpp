#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "rqvt/ml/dataset.hpp"
#include "rqvt/pipeline/csv.hpp"
#include "rqvt/pipeline/extract.hpp"
#include "rqvt/volume_io.hpp"

namespace rqvt {

inline void write_feature_csv(const std::vector<FeatureRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << "lesion_id,patient_id,label";
  for (const auto& id : lesion_row_ids()) out << ',' << id;
  out << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.lesion_id) << ',' << csv_field(r.patient_id) << ',';
    if (r.label >= 0) out << r.label;
    for (double v : r.values) out << ',' << format_sig17(v);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

/// Feature CSV -> dataset with every feature column. Rows without a label
/// get label 0 and are reported through `labelled`.
inline ml::Dataset read_feature_csv(const std::filesystem::path& path, std::vector<bool>* labelled = nullptr) {
  const auto t = read_csv(path, ErrorCode::ConfigError);
  if (t.header.size() < 3 || t.header[0] != "lesion_id" || t.header[1] != "patient_id" || t.header[2] != "label")
    throw Error(ErrorCode::ConfigError, path.string() + ": expected lesion_id,patient_id,label,... header");
  ml::Dataset d;
  d.feature_ids.assign(t.header.begin() + 3, t.header.end());
  std::vector<double> x(d.cols());
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < x.size(); ++c) {
      try {
        x[c] = parse_real(row[c + 3]);
      } catch (const Error&) {
        throw Error(ErrorCode::ConfigError, path.string() + ": bad value in column " + t.header[c + 3]);
      }
    }
    const auto& lab = row[2];
    if (!lab.empty() && lab != "0" && lab != "1") throw Error(ErrorCode::ConfigError, path.string() + ": label must be 0, 1 or empty");
    if (labelled) labelled->push_back(!lab.empty());
    d.add_row(x, lab == "1" ? 1 : 0, row[1], row[0]);
  }
  d.validate();
  return d;
}

enum class FeatureProfile { Both, Baseline, FollowUp };

inline FeatureProfile parse_profile(const std::string& s) {
  if (s == "both") return FeatureProfile::Both;
  if (s == "tp1") return FeatureProfile::Baseline;
  if (s == "tp2") return FeatureProfile::FollowUp;
  throw Error(ErrorCode::ConfigError, "unknown profile '" + s + "' (expected both, tp1 or tp2)");
}

inline std::string to_string(FeatureProfile p) {
  return p == FeatureProfile::Both ? "both" : p == FeatureProfile::Baseline ? "tp1" : "tp2";
}

inline std::size_t profile_width(FeatureProfile p) { return p == FeatureProfile::Both ? kLesionRowColumns : kTimepointColumns; }

/// Keeps the columns of the profile, in table order, and checks the count.
inline ml::Dataset select_profile(const ml::Dataset& d, FeatureProfile p) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < d.cols(); ++c) {
    const auto& id = d.feature_ids[c];
    const bool tp1 = id.ends_with("_TP1"), tp2 = id.ends_with("_TP2");
    if ((p == FeatureProfile::Both && (tp1 || tp2)) || (p == FeatureProfile::Baseline && tp1) || (p == FeatureProfile::FollowUp && tp2))
      keep.push_back(c);
  }
  if (keep.size() != profile_width(p))
    throw Error(ErrorCode::WidthMismatch, "profile " + to_string(p) + " expects " + std::to_string(profile_width(p)) +
                                              " columns, table has " + std::to_string(keep.size()));
  return d.select_columns(keep);
}

/// Columns of `d` named by `ids`, in that order.
inline ml::Dataset select_ids(const ml::Dataset& d, const std::vector<std::string>& ids) {
  std::vector<std::size_t> keep;
  for (const auto& id : ids) {
    const auto it = std::find(d.feature_ids.begin(), d.feature_ids.end(), id);
    if (it == d.feature_ids.end()) throw Error(ErrorCode::WidthMismatch, "feature table lacks column " + id);
    keep.push_back(static_cast<std::size_t>(it - d.feature_ids.begin()));
  }
  return d.select_columns(keep);
}

/// A column id split into its parts, e.g. glszm_ZoneEntropy_L_TP2 ->
/// (glszm, ZoneEntropy, L, TP2). Vessel columns have an empty roi.
struct FeatureName {
  std::string family;
  std::string name;
  std::string roi;
  std::string tp;

  std::string id() const { return family + "_" + name + (roi.empty() ? "" : "_" + roi) + "_" + tp; }
};

inline std::optional<FeatureName> parse_feature_id(const std::string& id) {
  FeatureName f;
  auto cut_suffix = [](std::string& s) -> std::string {
    const auto p = s.rfind('_');
    if (p == std::string::npos) return {};
    auto tail = s.substr(p + 1);
    s.resize(p);
    return tail;
  };
  std::string rest = id;
  f.tp = cut_suffix(rest);
  if (f.tp != "TP1" && f.tp != "TP2") return std::nullopt;
  const auto p = rest.find('_');
  if (p == std::string::npos) return std::nullopt;
  f.family = rest.substr(0, p);
  if (f.family == "qvt" || f.family == "fractal") {
    f.name = rest.substr(p + 1);
  } else {
    f.roi = cut_suffix(rest);
    if (f.roi != "L" && f.roi != "B") return std::nullopt;
    f.name = rest.substr(p + 1);
  }
  if (f.name.empty()) return std::nullopt;
  return f;
}

}  // namespace rqvt
