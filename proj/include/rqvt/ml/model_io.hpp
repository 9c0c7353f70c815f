#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rqvt/ml/models.hpp"

namespace rqvt::ml {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const Model& m) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = to_string(m.kind);
  j["seed"] = m.seed;
  j["feature_ids"] = m.feature_ids;
  if (m.kind == ModelKind::RandomForest) {
    j["params"] = {{"trees", m.forest.trees},
                   {"features_per_split", m.forest.features_per_split},
                   {"min_leaf", m.forest.min_leaf},
                   {"max_depth", m.forest.max_depth}};
  } else {
    j["params"] = {{"stages", m.boosting.stages},
                   {"learning_rate", m.boosting.learning_rate},
                   {"max_depth", m.boosting.max_depth},
                   {"min_leaf", m.boosting.min_leaf}};
    j["init_score"] = m.init_score;
  }
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& t : m.trees)
    trees.push_back({{"feature", t.feature},
                     {"threshold", t.threshold},
                     {"left", t.left},
                     {"right", t.right},
                     {"value", t.value},
                     {"gain", t.gain}});
  return j;
}

namespace detail {

inline void check_tree(const Tree& t, std::size_t cols) {
  const std::size_t n = t.feature.size();
  if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n ||
      t.gain.size() != n)
    throw Error(ErrorCode::CorruptModelFile, "tree arrays have inconsistent lengths");
  for (std::size_t i = 0; i < n; ++i) {
    const bool leaf = t.left[i] < 0;
    if (leaf != (t.right[i] < 0)) throw Error(ErrorCode::CorruptModelFile, "node with a single child");
    if (leaf) continue;
    // Children are stored after their parent, which also rules out cycles.
    if (t.feature[i] < 0 || static_cast<std::size_t>(t.feature[i]) >= cols)
      throw Error(ErrorCode::CorruptModelFile, "split feature index out of range");
    for (int c : {t.left[i], t.right[i]})
      if (static_cast<std::size_t>(c) <= i || static_cast<std::size_t>(c) >= n)
        throw Error(ErrorCode::CorruptModelFile, "child index out of range");
  }
}

}  // namespace detail

inline Model model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("format_version")) throw Error(ErrorCode::CorruptModelFile, "missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) + ", expected " +
                                                  std::to_string(kModelFormatVersion));
    Model m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "rf" && kind != "gb") throw Error(ErrorCode::CorruptModelFile, "unknown model kind " + kind);
    m.kind = parse_model_kind(kind);
    m.seed = j.at("seed").get<std::uint64_t>();
    m.feature_ids = j.at("feature_ids").get<std::vector<std::string>>();
    const auto& p = j.at("params");
    if (m.kind == ModelKind::RandomForest) {
      m.forest.trees = p.at("trees").get<int>();
      m.forest.features_per_split = p.at("features_per_split").get<int>();
      m.forest.min_leaf = p.at("min_leaf").get<int>();
      m.forest.max_depth = p.at("max_depth").get<int>();
    } else {
      m.boosting.stages = p.at("stages").get<int>();
      m.boosting.learning_rate = p.at("learning_rate").get<double>();
      m.boosting.max_depth = p.at("max_depth").get<int>();
      m.boosting.min_leaf = p.at("min_leaf").get<int>();
      m.init_score = j.at("init_score").get<double>();
    }
    for (const auto& jt : j.at("trees")) {
      Tree t;
      t.feature = jt.at("feature").get<std::vector<int>>();
      t.threshold = jt.at("threshold").get<std::vector<double>>();
      t.left = jt.at("left").get<std::vector<int>>();
      t.right = jt.at("right").get<std::vector<int>>();
      t.value = jt.at("value").get<std::vector<double>>();
      t.gain = jt.at("gain").get<std::vector<double>>();
      detail::check_tree(t, m.feature_ids.size());
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptModelFile, std::string("model file: ") + e.what());
  }
}

inline void save_model(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << model_to_json(m).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

inline Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptModelFile, std::string("model file: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace rqvt::ml
