#pragma once

#include <string>
#include <vector>

#include "rqvt/error.hpp"
#include "rqvt/features/discretize.hpp"
#include "rqvt/features/feature_vector.hpp"
#include "rqvt/features/first_order.hpp"
#include "rqvt/features/shape.hpp"
#include "rqvt/features/texture_features.hpp"

namespace rqvt {

struct RadiomicsConfig {
  double bin_width = kDefaultBinWidth;
  TextureParams texture{};
};

/// 3 shape + 16 first-order + 74 texture features for one ROI. The ROI and
/// volume are cropped to the ROI bounding box first; every feature is
/// invariant to that crop.
inline FeatureVector roi_feature_block(const ScalarVolume& v, const BinaryMask& roi,
                                       const RadiomicsConfig& cfg = {}) {
  require_same_geometry(v.geometry, roi.geometry, "roi_feature_block");
  const auto box = bounding_box(roi);
  if (box.empty()) throw Error(ErrorCode::EmptyRoi, "roi_feature_block");
  const auto vc = crop(v, box.lo, box.extent());
  const auto mc = crop(roi, box.lo, box.extent());

  FeatureVector out;
  out.append(shape_features_guarded(mc));
  out.append(first_order_features(vc, mc, cfg.bin_width));
  out.append(texture_features(discretize(vc, mc, cfg.bin_width), cfg.texture));
  return out;
}

inline constexpr std::size_t kRoiFeatureCount = 93;

/// Feature ids of roi_feature_block, in order.
inline const std::vector<std::string>& roi_feature_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out{"shape_Sphericity", "shape_Elongation", "shape_Flatness"};
    for (const char* n : {"Minimum", "Maximum", "Mean", "Median", "Range", "Variance", "Skewness", "Kurtosis",
                          "MeanAbsoluteDeviation", "RobustMeanAbsoluteDeviation", "RootMeanSquared",
                          "Percentile10", "Percentile90", "InterquartileRange", "Entropy", "Uniformity"})
      out.push_back(std::string("firstorder_") + n);
    for (const auto& n : glcm_feature_names()) out.push_back("glcm_" + n);
    for (const auto& n : glrlm_feature_names()) out.push_back("glrlm_" + n);
    for (const auto& n : glszm_feature_names()) out.push_back("glszm_" + n);
    for (const auto& n : gldm_feature_names()) out.push_back("gldm_" + n);
    for (const auto& n : ngtdm_feature_names()) out.push_back("ngtdm_" + n);
    return out;
  }();
  return ids;
}

/// Size-bearing features deliberately absent from the catalog, so that the
/// block carries no direct measure of lesion size.
inline const std::vector<std::string>& excluded_size_features() {
  static const std::vector<std::string> ids{
      "shape_MeshVolume",          "shape_VoxelVolume",          "shape_SurfaceArea",
      "shape_SurfaceVolumeRatio",  "shape_Maximum3DDiameter",    "shape_Maximum2DDiameterSlice",
      "shape_Maximum2DDiameterColumn", "shape_Maximum2DDiameterRow", "shape_MajorAxisLength",
      "shape_MinorAxisLength",     "shape_LeastAxisLength",      "firstorder_Energy",
      "firstorder_TotalEnergy",    "gldm_DependenceNonUniformity"};
  return ids;
}

}  // namespace rqvt
