#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rqvt/features/roi_block.hpp"
#include "rqvt/pipeline/config.hpp"
#include "rqvt/pipeline/manifest.hpp"
#include "rqvt/roi.hpp"
#include "rqvt/vessel/vessel_block.hpp"
#include "rqvt/volume_io.hpp"

namespace rqvt {

inline constexpr std::size_t kTimepointColumns = 2 * kRoiFeatureCount + kVesselFeatureCount;  // 230
inline constexpr std::size_t kLesionRowColumns = 2 * kTimepointColumns;                       // 460

inline const char* timepoint_tag(int timepoint) { return timepoint == 0 ? "TP1" : "TP2"; }

/// Column ids for one timepoint: lesion ROI, band ROI, vessel tree.
inline std::vector<std::string> timepoint_column_ids(int timepoint) {
  const std::string tp = timepoint_tag(timepoint);
  std::vector<std::string> ids;
  for (const auto& f : roi_feature_ids()) ids.push_back(f + "_L_" + tp);
  for (const auto& f : roi_feature_ids()) ids.push_back(f + "_B_" + tp);
  for (const auto& f : vessel_feature_ids()) ids.push_back(f + "_" + tp);
  return ids;
}

inline const std::vector<std::string>& lesion_row_ids() {
  static const std::vector<std::string> ids = [] {
    auto v = timepoint_column_ids(0);
    for (auto& s : timepoint_column_ids(1)) v.push_back(std::move(s));
    return v;
  }();
  return ids;
}

struct FeatureRow {
  std::string lesion_id;
  std::string patient_id;
  std::vector<double> values;  // lesion_row_ids() order
  int label = -1;              // -1 until labelled
};

/// Features of one scan: resample to the isotropic grid, then lesion ROI,
/// boundary band and vessel blocks (230 values).
inline FeatureVector timepoint_features(const ScalarVolume& raw_volume, const BinaryMask& raw_lesion,
                                        const std::optional<BinaryMask>& raw_lung, const PipelineConfig& cfg, int timepoint) {
  require_same_geometry(raw_volume.geometry, raw_lesion.geometry, "lesion mask");
  if (raw_lung) require_same_geometry(raw_volume.geometry, raw_lung->geometry, "lung mask");
  const auto v = resample_isotropic(raw_volume, cfg.resample_mm);
  const auto lesion = resample_mask_nearest(raw_lesion, cfg.resample_mm);
  if (is_empty(lesion)) throw Error(ErrorCode::EmptyMaskAfterResample, std::string("lesion mask at ") + timepoint_tag(timepoint));
  std::optional<BinaryMask> lung;
  if (raw_lung) lung = resample_mask_nearest(*raw_lung, cfg.resample_mm);

  const std::string tp = timepoint_tag(timepoint);
  FeatureVector out;
  out.append(roi_feature_block(v, lesion, cfg.radiomics), "_L_" + tp);
  out.append(roi_feature_block(v, boundary_band(lesion, cfg.band_margin_mm, cfg.band_mode), cfg.radiomics), "_B_" + tp);
  out.append(vessel_feature_block(v, lesion, lung, cfg.vessel), "_" + tp);
  return out;
}

inline FeatureVector scan_features(const ScanRecord& s, const PipelineConfig& cfg, int timepoint) {
  std::optional<BinaryMask> lung;
  if (s.lung_mask_path) lung = read_mask(*s.lung_mask_path);
  return timepoint_features(read_volume(s.volume_path), read_mask(s.lesion_mask_path), lung, cfg, timepoint);
}

/// Baseline (timepoint 0 -> TP1) and first follow-up (timepoint 1 -> TP2)
/// features of one lesion; 460 values.
inline FeatureRow extract_lesion_row(const LesionRecord& rec, const PipelineConfig& cfg) {
  const ScanRecord* s0 = rec.scan(0);
  const ScanRecord* s1 = rec.scan(1);
  if (!s0 || !s1)
    throw Error(ErrorCode::MissingTimepoint, rec.lesion_id + ": timepoints 0 and 1 are both required");
  FeatureVector f = scan_features(*s0, cfg, 0);
  f.append(scan_features(*s1, cfg, 1));
  if (f.ids() != lesion_row_ids()) throw Error(ErrorCode::InvalidArgument, "internal: column layout drifted");
  return {rec.lesion_id, rec.patient_id, f.values(), -1};
}

/// Diameters for every scan of a lesion: manifest values when every scan has
/// one, otherwise the longest axial diameter of each lesion mask.
inline std::vector<DiameterRecord> lesion_diameters(const LesionRecord& rec) {
  const bool from_manifest =
      std::all_of(rec.scans.begin(), rec.scans.end(), [](const ScanRecord& s) { return s.diameter_mm.has_value(); });
  std::vector<DiameterRecord> out;
  for (const auto& s : rec.scans)
    out.push_back({rec.lesion_id, s.timepoint, from_manifest ? *s.diameter_mm : recist_diameter(read_mask(s.lesion_mask_path))});
  return out;
}

/// Shrinkage label per lesion from diameters over all timepoints: the
/// earliest timepoint is the baseline, every later one a follow-up.
inline std::map<std::string, int> label_lesions(const std::vector<DiameterRecord>& diameters) {
  std::map<std::string, std::vector<DiameterRecord>> by_lesion;
  for (const auto& d : diameters) by_lesion[d.lesion_id].push_back(d);
  std::map<std::string, int> labels;
  for (auto& [id, ds] : by_lesion) {
    std::sort(ds.begin(), ds.end(), [](const DiameterRecord& a, const DiameterRecord& b) { return a.timepoint < b.timepoint; });
    labels[id] = shrinkage_label(ds.front(), std::vector<DiameterRecord>(ds.begin() + 1, ds.end()));
  }
  return labels;
}

struct ExtractOutcome {
  std::vector<FeatureRow> rows;                               // ordered by lesion_id
  std::vector<std::pair<std::string, std::string>> failures;  // (lesion_id, message), ordered by lesion_id
};

/// Extracts and labels every record, isolating per-lesion failures. Runs on
/// `cfg.threads` workers; results are collected by index, so output does not
/// depend on scheduling.
inline ExtractOutcome extract_all(const std::vector<LesionRecord>& records, const PipelineConfig& cfg) {
  struct Slot {
    std::optional<FeatureRow> row;
    std::string error;
  };
  std::vector<Slot> slots(records.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      try {
        auto row = extract_lesion_row(records[i], cfg);
        row.label = label_lesions(lesion_diameters(records[i])).at(records[i].lesion_id);
        slots[i].row = std::move(row);
      } catch (const Error& e) {
        slots[i].error = e.what();
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::max(1, std::min<int>(threads, static_cast<int>(records.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return records[a].lesion_id < records[b].lesion_id; });
  ExtractOutcome out;
  for (auto i : order) {
    if (slots[i].row) out.rows.push_back(std::move(*slots[i].row));
    else out.failures.emplace_back(records[i].lesion_id, slots[i].error);
  }
  return out;
}

}  // namespace rqvt
