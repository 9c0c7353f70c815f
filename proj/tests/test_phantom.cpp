#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rqvt/phantom/dataset.hpp"
#include "rqvt/pipeline/extract.hpp"
#include "test_util.hpp"

using namespace rqvt;
using std::numbers::pi;

TEST(Ellipsoid, VoxelVolumeMatchesAnalytic) {
  for (const Vec3 axes : {Vec3{10, 8, 6}, Vec3{20, 10, 10}, Vec3{5, 5, 5}}) {
    auto [v, m] = ellipsoid_phantom(axes, 0.5, 40.0, -850.0);
    const double truth = 4.0 / 3.0 * pi * axes[0] * axes[1] * axes[2];
    EXPECT_NEAR(static_cast<double>(count_foreground(m)) * 0.125, truth, 0.02 * truth);
    EXPECT_EQ(v(0, 0, 0), -850.0);
    const auto c = v.geometry.dims;
    EXPECT_EQ(v(c[0] / 2, c[1] / 2, c[2] / 2), 40.0);
  }
  EXPECT_THROW(ellipsoid_phantom({1.0, 5, 5}, 0.5, 0, 0), Error);
  try {
    ellipsoid_phantom({1.0, 5, 5}, 0.5, 0, 0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooSmall);
  }
}

TEST(Tube, VoxelVolumeMatchesCapsule) {
  const std::vector<ParametricCurve> curves{ParametricCurve::line({0, 0, 0}, {30, 10, 5}),
                                            ParametricCurve::helix({0, 0, 0}, 10, 5, 3 * pi)};
  for (double r : {2.25, 3.0, 3.75, 4.5})
    for (const auto& c : curves) {
      const auto m = tube_phantom(c, r, 0.75);
      const double truth = pi * r * r * c.arc_length() + 4.0 / 3.0 * pi * r * r * r;
      EXPECT_NEAR(static_cast<double>(count_foreground(m)) * 0.421875, truth, 0.05 * truth) << "radius " << r;
    }
  // Arcs drawn in a lattice plane sample the cross-section tangent to its rim;
  // by 6 voxels of radius that bias is within tolerance too.
  const auto ring = ParametricCurve::arc({0, 0, 0}, 15, pi);
  const double truth = pi * 4.5 * 4.5 * ring.arc_length() + 4.0 / 3.0 * pi * std::pow(4.5, 3);
  EXPECT_NEAR(static_cast<double>(count_foreground(tube_phantom(ring, 4.5, 0.75))) * 0.421875, truth, 0.05 * truth);
}

TEST(Tube, Errors) {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoFailure;
  };
  EXPECT_EQ(code([] { tube_phantom(ParametricCurve::helix({0, 0, 0}, 10, 0.1, 4 * pi), 2.0, 0.75); }),
            ErrorCode::SelfIntersection);
  EXPECT_EQ(code([] { tube_phantom(ParametricCurve::line({0, 0, 0}, {10, 0, 0}), 0.5, 0.75); }), ErrorCode::TooSmall);
  EXPECT_NO_THROW(tube_phantom(ParametricCurve::helix({0, 0, 0}, 10, 3, 4 * pi), 2.0, 0.75));
}

TEST(Curve, AnalyticQuantities) {
  const auto h = ParametricCurve::helix({0, 0, 0}, 10, 5, 3 * pi);
  EXPECT_NEAR(h.arc_length(), 3 * pi * std::sqrt(125.0), 1e-9);
  EXPECT_NEAR(h.curvature(), 0.08, 1e-12);
  EXPECT_NEAR(ParametricCurve::arc({0, 0, 0}, 20, pi).tortuosity(), pi / 2, 1e-12);
  EXPECT_TRUE(ParametricCurve::arc({0, 0, 0}, 5, 2 * pi).closed());
}

class Planted : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testutil::TempDir("planted");
    PlantedParams p;
    p.n_lesions = 40;
    summary_ = planted_dataset(p, dir_->path());
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static testutil::TempDir* dir_;
  static PlantedSummary summary_;
};
testutil::TempDir* Planted::dir_ = nullptr;
PlantedSummary Planted::summary_;

TEST_F(Planted, ManifestReadsBackAndIsBalanced) {
  const auto recs = read_manifest(summary_.manifest);
  ASSERT_EQ(recs.size(), 40u);
  for (const auto& r : recs) {
    ASSERT_EQ(r.scans.size(), 3u);
    for (const auto& s : r.scans) {
      EXPECT_TRUE(std::filesystem::exists(s.volume_path));
      EXPECT_TRUE(std::filesystem::exists(s.lesion_mask_path));
      ASSERT_TRUE(s.lung_mask_path);
      ASSERT_TRUE(s.diameter_mm);
      const auto v = read_volume(s.volume_path);
      const auto m = read_mask(s.lesion_mask_path);
      EXPECT_TRUE(same_geometry(v.geometry, m.geometry));
      EXPECT_FALSE(is_empty(m));
    }
  }
  EXPECT_GE(summary_.positives, 10u);
  EXPECT_LE(summary_.positives, 30u);
}

TEST_F(Planted, LabelsFollowFromDiameters) {
  const auto diam = read_csv(dir_->path() / "diameters.csv");
  std::vector<DiameterRecord> ds;
  for (const auto& row : diam.rows) ds.push_back({row[0], std::stoi(row[1]), parse_real(row[2])});
  const auto labels = label_lesions(ds);
  const auto truth = read_csv(dir_->path() / "truth.csv");
  ASSERT_EQ(truth.rows.size(), 40u);
  std::size_t pos = 0;
  for (const auto& row : truth.rows) {
    EXPECT_EQ(labels.at(row[0]), std::stoi(row[2])) << row[0];
    pos += static_cast<std::size_t>(std::stoi(row[2]));
  }
  EXPECT_EQ(pos, summary_.positives);

  // Mask diameters agree with the recorded ones to within a voxel.
  for (const auto& r : read_manifest(summary_.manifest))
    for (const auto& s : r.scans) EXPECT_NEAR(recist_diameter(read_mask(s.lesion_mask_path)), *s.diameter_mm, 0.75);
}

TEST_F(Planted, SameSeedSameBytes) {
  testutil::TempDir again("planted_again");
  PlantedParams p;
  p.n_lesions = 40;
  planted_dataset(p, again.path());
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir_->path())) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), dir_->path());
    EXPECT_EQ(testutil::read_file(e.path()), testutil::read_file(again.path() / rel)) << rel;
  }
  testutil::TempDir other("planted_other");
  p.seed = 8;
  planted_dataset(p, other.path());
  EXPECT_NE(testutil::read_file(dir_->path() / "truth.csv") + testutil::read_file(dir_->path() / "diameters.csv"),
            testutil::read_file(other.path() / "truth.csv") + testutil::read_file(other.path() / "diameters.csv"));
}

TEST(PlantedParamsCheck, RejectsBadInput) {
  testutil::TempDir dir("planted_bad");
  PlantedParams p;
  p.n_lesions = 39;
  EXPECT_THROW(planted_dataset(p, dir.path()), Error);
  p.n_lesions = 40;
  p.signal_feature_id = "glcm_Contrast";
  EXPECT_THROW(planted_dataset(p, dir.path()), Error);
  p.signal_feature_id = "glszm_NotAFeature";
  EXPECT_THROW(planted_dataset(p, dir.path()), Error);
}
