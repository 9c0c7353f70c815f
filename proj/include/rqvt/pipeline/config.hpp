#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rqvt/error.hpp"
#include "rqvt/features/roi_block.hpp"
#include "rqvt/ml/models.hpp"
#include "rqvt/roi.hpp"
#include "rqvt/vessel/vessel_block.hpp"

namespace rqvt {

struct PipelineConfig {
  double resample_mm = 0.75;
  double band_margin_mm = 2.0;
  BandMode band_mode = BandMode::Outer;
  RadiomicsConfig radiomics;
  VesselParams vessel;
  ml::ForestParams forest;
  ml::BoostingParams boosting;
  int k = 5;
  std::uint64_t seed = 7;
  int threads = 0;  // 0 = hardware concurrency
  int top_n = 10;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Reads a config object. Missing keys keep their defaults; unknown keys and
/// ill-typed values are errors.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  using detail::read_key;
  PipelineConfig c;
  try {
    detail::reject_unknown(j, {"resample_mm", "band_margin_mm", "band_mode", "bin_width", "lung", "vessel", "rf", "gb", "k",
                               "seed", "threads", "top_n"},
                           "config");
    read_key(j, "resample_mm", c.resample_mm);
    read_key(j, "band_margin_mm", c.band_margin_mm);
    if (j.contains("band_mode")) {
      const auto m = j.at("band_mode").get<std::string>();
      if (m == "outer") c.band_mode = BandMode::Outer;
      else if (m == "symmetric") c.band_mode = BandMode::Symmetric;
      else throw Error(ErrorCode::ConfigError, "band_mode must be 'outer' or 'symmetric'");
    }
    read_key(j, "bin_width", c.radiomics.bin_width);
    if (j.contains("lung")) {
      const auto& l = j.at("lung");
      detail::reject_unknown(l, {"threshold_hu", "keep_components", "closing_radius_voxels"}, "lung");
      read_key(l, "threshold_hu", c.vessel.lung.threshold_hu);
      read_key(l, "keep_components", c.vessel.lung.keep_components);
      read_key(l, "closing_radius_voxels", c.vessel.lung.closing_radius_voxels);
    }
    if (j.contains("vessel")) {
      const auto& v = j.at("vessel");
      detail::reject_unknown(v, {"mode", "fixed_threshold_hu", "min_spur", "curvature_window", "smoothing_mm"}, "vessel");
      if (v.contains("mode")) {
        const auto m = v.at("mode").get<std::string>();
        if (m == "otsu") c.vessel.segmentation.mode = VesselSegmentation::Mode::Otsu;
        else if (m == "fixed") c.vessel.segmentation.mode = VesselSegmentation::Mode::Fixed;
        else throw Error(ErrorCode::ConfigError, "vessel.mode must be 'otsu' or 'fixed'");
      }
      read_key(v, "fixed_threshold_hu", c.vessel.segmentation.fixed_threshold_hu);
      read_key(v, "min_spur", c.vessel.min_spur);
      read_key(v, "curvature_window", c.vessel.curve.curvature_window);
      read_key(v, "smoothing_mm", c.vessel.curve.smoothing_mm);
    }
    if (j.contains("rf")) {
      const auto& r = j.at("rf");
      detail::reject_unknown(r, {"trees", "features_per_split", "min_leaf", "max_depth"}, "rf");
      read_key(r, "trees", c.forest.trees);
      read_key(r, "features_per_split", c.forest.features_per_split);
      read_key(r, "min_leaf", c.forest.min_leaf);
      read_key(r, "max_depth", c.forest.max_depth);
    }
    if (j.contains("gb")) {
      const auto& g = j.at("gb");
      detail::reject_unknown(g, {"stages", "learning_rate", "max_depth", "min_leaf"}, "gb");
      read_key(g, "stages", c.boosting.stages);
      read_key(g, "learning_rate", c.boosting.learning_rate);
      read_key(g, "max_depth", c.boosting.max_depth);
      read_key(g, "min_leaf", c.boosting.min_leaf);
    }
    read_key(j, "k", c.k);
    read_key(j, "seed", c.seed);
    read_key(j, "threads", c.threads);
    read_key(j, "top_n", c.top_n);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }

  if (!(c.resample_mm > 0.0)) throw Error(ErrorCode::ConfigError, "resample_mm must be positive");
  if (!(c.band_margin_mm > 0.0)) throw Error(ErrorCode::ConfigError, "band_margin_mm must be positive");
  if (!(c.radiomics.bin_width > 0.0)) throw Error(ErrorCode::ConfigError, "bin_width must be positive");
  if (c.vessel.curve.curvature_window < 1) throw Error(ErrorCode::ConfigError, "vessel.curvature_window must be >= 1");
  if (c.vessel.curve.smoothing_mm < 0.0) throw Error(ErrorCode::ConfigError, "vessel.smoothing_mm must be >= 0");
  if (c.forest.trees < 1 || c.forest.min_leaf < 1) throw Error(ErrorCode::ConfigError, "rf.trees and rf.min_leaf must be >= 1");
  if (c.boosting.stages < 0 || c.boosting.min_leaf < 1 || c.boosting.learning_rate < 0.0)
    throw Error(ErrorCode::ConfigError, "gb: stages >= 0, min_leaf >= 1, learning_rate >= 0 required");
  if (c.k < 2) throw Error(ErrorCode::ConfigError, "k must be >= 2");
  if (c.threads < 0) throw Error(ErrorCode::ConfigError, "threads must be >= 0");
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
}

/// The full default configuration, every key spelled out.
inline nlohmann::json config_to_json(const PipelineConfig& c) {
  return {{"resample_mm", c.resample_mm},
          {"band_margin_mm", c.band_margin_mm},
          {"band_mode", c.band_mode == BandMode::Outer ? "outer" : "symmetric"},
          {"bin_width", c.radiomics.bin_width},
          {"lung",
           {{"threshold_hu", c.vessel.lung.threshold_hu},
            {"keep_components", c.vessel.lung.keep_components},
            {"closing_radius_voxels", c.vessel.lung.closing_radius_voxels}}},
          {"vessel",
           {{"mode", c.vessel.segmentation.mode == VesselSegmentation::Mode::Otsu ? "otsu" : "fixed"},
            {"fixed_threshold_hu", c.vessel.segmentation.fixed_threshold_hu},
            {"min_spur", c.vessel.min_spur},
            {"curvature_window", c.vessel.curve.curvature_window},
            {"smoothing_mm", c.vessel.curve.smoothing_mm}}},
          {"rf",
           {{"trees", c.forest.trees},
            {"features_per_split", c.forest.features_per_split},
            {"min_leaf", c.forest.min_leaf},
            {"max_depth", c.forest.max_depth}}},
          {"gb",
           {{"stages", c.boosting.stages},
            {"learning_rate", c.boosting.learning_rate},
            {"max_depth", c.boosting.max_depth},
            {"min_leaf", c.boosting.min_leaf}}},
          {"k", c.k},
          {"seed", c.seed},
          {"threads", c.threads},
          {"top_n", c.top_n}};
}

}  // namespace rqvt
