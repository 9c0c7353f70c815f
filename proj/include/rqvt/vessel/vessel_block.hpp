#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rqvt/features/feature_vector.hpp"
#include "rqvt/vessel/branches.hpp"
#include "rqvt/vessel/fractal.hpp"
#include "rqvt/vessel/qvt.hpp"
#include "rqvt/vessel/segment.hpp"
#include "rqvt/vessel/skeleton.hpp"

namespace rqvt {

struct VesselParams {
  LungThresholdParams lung;
  VesselSegmentation segmentation;
  int min_spur = 3;
  CurveParams curve;
};

inline constexpr std::size_t kVesselFeatureCount = kQvtFeatureCount + kFractalScales;

inline const std::vector<std::string>& vessel_feature_ids() {
  static const std::vector<std::string> ids = [] {
    auto v = qvt_feature_ids();
    for (const auto& f : fractal_feature_ids()) v.push_back(f);
    return v;
  }();
  return ids;
}

struct VesselAnalysis {
  BinaryMask lung;
  BinaryMask vessels;
  BinaryMask tree;
  BinaryMask skeleton;
  SkeletonGraph graph;
  FeatureVector features;  // 34 QVT + 10 fractal
};

/// Lung (given or thresholded) -> vessels -> lesion-attached tree ->
/// skeleton -> branch graph -> QVT and fractal features of the tree.
inline VesselAnalysis analyze_vessels(const ScalarVolume& v, const BinaryMask& lesion, const std::optional<BinaryMask>& lung,
                                      const VesselParams& params = {}) {
  require_same_geometry(v.geometry, lesion.geometry, "analyze_vessels");
  VesselAnalysis a;
  if (lung) {
    require_same_geometry(v.geometry, lung->geometry, "analyze_vessels: lung");
    a.lung = *lung;
  } else {
    a.lung = lung_mask_threshold(v, params.lung);
  }
  a.vessels = segment_vessels(v, a.lung, params.segmentation);
  a.tree = lesion_attached_tree(a.vessels, lesion);
  a.skeleton = skeletonize(a.tree);
  a.graph = branch_decompose(a.skeleton, params.min_spur);
  a.features = qvt_features(a.graph, a.tree, params.curve);
  a.features.append(fractal_dimensions(a.tree));
  return a;
}

inline FeatureVector vessel_feature_block(const ScalarVolume& v, const BinaryMask& lesion, const std::optional<BinaryMask>& lung,
                                          const VesselParams& params = {}) {
  return analyze_vessels(v, lesion, lung, params).features;
}

}  // namespace rqvt
