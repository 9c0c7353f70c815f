#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "rqvt/features/roi_block.hpp"
#include "rqvt/phantom/shapes.hpp"
#include "rqvt/vessel/vessel_block.hpp"

using namespace rqvt;

namespace {

Geometry box(int nx, int ny, int nz) {
  Geometry g;
  g.dims = {nx, ny, nz};
  return g;
}

BinaryMask ball(int r) {
  BinaryMask m(box(2 * r + 3, 2 * r + 3, 2 * r + 3));
  const int c = r + 1;
  for (int z = 0; z < m.dims()[2]; ++z)
    for (int y = 0; y < m.dims()[1]; ++y)
      for (int x = 0; x < m.dims()[0]; ++x)
        if ((x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c) <= r * r) m(x, y, z) = 1;
  return m;
}

ScalarVolume row_volume(std::initializer_list<double> vals) {
  ScalarVolume v(box(static_cast<int>(vals.size()), 1, 1));
  v.data.assign(vals);
  return v;
}

std::size_t name_index(const std::vector<std::string>& names, const std::string& n) {
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin());
}

}  // namespace

TEST(Discretize, FloorArithmetic) {
  auto v = row_volume({0, 24.9, 25, 50});
  auto g = discretize(v, BinaryMask(v.geometry, 1), 25.0);
  EXPECT_EQ(g.levels.data, (std::vector<int>{1, 1, 2, 3}));

  v = row_volume({-100, 0, 100});
  g = discretize(v, BinaryMask(v.geometry, 1), 50.0);
  EXPECT_EQ(g.levels.data, (std::vector<int>{1, 3, 5}));
  EXPECT_EQ(g.ng, 5);

  v = row_volume({40, 40, 40});
  EXPECT_EQ(discretize(v, BinaryMask(v.geometry, 1)).ng, 1);
  EXPECT_THROW(discretize(v, BinaryMask(v.geometry, 0)), Error);
  EXPECT_THROW(discretize(v, BinaryMask(v.geometry, 1), 0.0), Error);
  EXPECT_THROW(discretize(v, BinaryMask(box(2, 1, 1), 1)), Error);
}

TEST(Shape, BallIsIsotropic) {
  const auto f = shape_features(ball(20));
  EXPECT_NEAR(f.at("shape_Sphericity"), 1.0, 0.03);
  EXPECT_NEAR(f.at("shape_Elongation"), 1.0, 0.02);
  EXPECT_NEAR(f.at("shape_Flatness"), 1.0, 0.02);
  const auto g = shape_features(ball(10));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(f.value(i), g.value(i), 0.03) << f.id(i);
}

TEST(Shape, ProlateEllipsoid) {
  const auto [v, m] = ellipsoid_phantom({20, 10, 10}, 1.0, 1.0, 0.0);
  const auto f = shape_features(m);
  EXPECT_NEAR(f.at("shape_Elongation"), 0.5, 0.025);
  EXPECT_NEAR(f.at("shape_Flatness"), 0.5, 0.025);
}

TEST(Shape, DegenerateGeometry) {
  BinaryMask line(box(5, 1, 1), 1);
  EXPECT_THROW(shape_features(line), Error);
  const auto g = shape_features_guarded(line);
  for (double x : g.values()) EXPECT_TRUE(std::isfinite(x));
}

TEST(FirstOrder, HandValues) {
  const auto v = row_volume({1, 2, 3, 4});
  const auto f = first_order_features(v, BinaryMask(v.geometry, 1));
  EXPECT_DOUBLE_EQ(f.at("firstorder_Mean"), 2.5);
  EXPECT_DOUBLE_EQ(f.at("firstorder_Variance"), 1.25);
  EXPECT_DOUBLE_EQ(f.at("firstorder_Range"), 3.0);
  EXPECT_NEAR(f.at("firstorder_RootMeanSquared"), std::sqrt(7.5), 1e-12);
  EXPECT_EQ(f.size(), 16u);
}

TEST(FirstOrder, ConstantAndSymmetric) {
  const auto c = row_volume({40, 40, 40, 40});
  const auto f = first_order_features(c, BinaryMask(c.geometry, 1));
  EXPECT_EQ(f.at("firstorder_Variance"), 0.0);
  EXPECT_EQ(f.at("firstorder_Entropy"), 0.0);
  EXPECT_EQ(f.at("firstorder_Uniformity"), 1.0);
  EXPECT_EQ(f.at("firstorder_Skewness"), 0.0);
  EXPECT_EQ(f.at("firstorder_Kurtosis"), 0.0);
  const auto s = row_volume({-30, 0, 30});
  EXPECT_NEAR(first_order_features(s, BinaryMask(s.geometry, 1)).at("firstorder_Skewness"), 0.0, 1e-12);
}

TEST(FirstOrder, MeanOverEllipsoidIsExact) {
  const auto [v, m] = ellipsoid_phantom({6, 5, 4}, 0.75, -100.0, -850.0, 2.0);
  EXPECT_EQ(first_order_features(v, m).at("firstorder_Mean"), -100.0);
}

TEST(TextureMatrix, HandEnumeratedCases) {
  Grid<int> lv(box(2, 2, 1));
  lv.data = {1, 2, 3, 4};
  const GrayLevelVolume g{lv, 4, 25.0, 0.0};
  const auto glcm = texture_matrix(TextureKind::GLCM, g);
  ASSERT_EQ(glcm.size(), 13u);
  ASSERT_EQ(texture_directions()[0], (Index3{1, 0, 0}));
  Matrix2D expect(4, 4);
  expect(0, 1) = expect(1, 0) = expect(2, 3) = expect(3, 2) = 1;
  EXPECT_EQ(glcm[0].values, expect.values);

  Grid<int> row(box(5, 1, 1));
  row.data = {1, 1, 1, 2, 2};
  const auto glrlm = texture_matrix(TextureKind::GLRLM, GrayLevelVolume{row, 2, 25.0, 0.0});
  EXPECT_EQ(glrlm[0].sum(), 2.0);
  EXPECT_EQ(glrlm[0](0, 2), 1.0);
  EXPECT_EQ(glrlm[0](1, 1), 1.0);

  const GrayLevelVolume cube{Grid<int>(box(3, 3, 3), 1), 1, 25.0, 0.0};
  const auto glszm = texture_matrix(TextureKind::GLSZM, cube);
  ASSERT_EQ(glszm.size(), 1u);
  EXPECT_EQ(glszm[0].sum(), 1.0);
  EXPECT_EQ(glszm[0](0, 26), 1.0);

  EXPECT_EQ(parse_texture_kind("glszm"), TextureKind::GLSZM);
  EXPECT_THROW(parse_texture_kind("lbp"), Error);
}

TEST(TextureFeatures, ConstantCube) {
  const GrayLevelVolume cube{Grid<int>(box(4, 4, 4), 1), 1, 25.0, 0.0};
  const auto f = texture_features(cube);
  EXPECT_EQ(f.size(), 74u);
  EXPECT_EQ(f.at("glszm_ZoneEntropy"), 0.0);
  EXPECT_EQ(f.at("glcm_JointEntropy"), 0.0);
  // One level, so GLN equals the run count; averaged over the 13 directions.
  const auto runs = texture_matrix(TextureKind::GLRLM, cube);
  double mean_runs = 0.0;
  for (const auto& m : runs) mean_runs += m.sum() / 13.0;
  EXPECT_NEAR(f.at("glrlm_GrayLevelNonUniformity"), mean_runs, 1e-9);
}

TEST(TextureFeatures, CheckerboardContrastPerAxis) {
  Grid<int> lv(box(4, 4, 4));
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) lv(x, y, z) = 1 + (x + y + z) % 2;
  const GrayLevelVolume g{lv, 2, 25.0, 0.0};
  const auto glcm = texture_matrix(TextureKind::GLCM, g);
  const auto contrast = name_index(glcm_feature_names(), "Contrast");
  for (std::size_t d = 0; d < 3; ++d) EXPECT_DOUBLE_EQ(glcm_direction_features(glcm[d], 2)[contrast], 1.0);
}

TEST(RoiBlock, LengthIdsAndTranslation) {
  std::mt19937_64 rng(21);
  ScalarVolume v(box(12, 12, 12));
  std::uniform_real_distribution<double> u(-100.0, 200.0);
  for (auto& x : v.data) x = std::round(u(rng));
  BinaryMask m(v.geometry);
  for (int z = 2; z < 8; ++z)
    for (int y = 3; y < 9; ++y)
      for (int x = 2; x < 7; ++x) m(x, y, z) = (x + 2 * y + z) % 5 != 0;
  const auto f = roi_feature_block(v, m);
  ASSERT_EQ(f.size(), kRoiFeatureCount);
  EXPECT_EQ(f.ids(), roi_feature_ids());
  EXPECT_EQ(std::set<std::string>(f.ids().begin(), f.ids().end()).size(), kRoiFeatureCount);
  for (double x : f.values()) EXPECT_TRUE(std::isfinite(x));

  ScalarVolume v2(box(12, 12, 12), 0.0);
  BinaryMask m2(v2.geometry);
  for (int z = 0; z < 12; ++z)
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x) {
        const int sx = x - 3, sy = y - 2, sz = z - 1;
        if (sx < 0 || sy < 0 || sz < 0) continue;
        v2(x, y, z) = v(sx, sy, sz);
        m2(x, y, z) = m(sx, sy, sz);
      }
  EXPECT_EQ(roi_feature_block(v2, m2).values(), f.values());
  EXPECT_EQ(roi_feature_block(v, m).values(), f.values());
}

TEST(RoiBlock, SingleVoxelIsFinite) {
  ScalarVolume v(box(3, 3, 3), 10.0);
  BinaryMask m(v.geometry);
  m(1, 1, 1) = 1;
  const auto block = roi_feature_block(v, m);
  for (double x : block.values()) EXPECT_TRUE(std::isfinite(x));
}

TEST(Catalog, FileMatchesCode) {
  std::ifstream in(std::string(RQVT_SOURCE_DIR) + "/catalog/features.txt");
  ASSERT_TRUE(in);
  std::map<std::string, std::vector<std::string>> sections;
  std::string line, current;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      current = line.substr(1, line.size() - 2);
      continue;
    }
    sections[current].push_back(line);
  }
  EXPECT_EQ(sections["roi"], roi_feature_ids());
  EXPECT_EQ(sections["vessel"], vessel_feature_ids());
  EXPECT_EQ(sections["excluded"], excluded_size_features());
  EXPECT_EQ(sections["roi"].size(), 93u);
  EXPECT_EQ(sections["vessel"].size(), 44u);

  std::map<std::string, int> family;
  for (const auto& id : roi_feature_ids()) ++family[id.substr(0, id.find('_'))];
  EXPECT_EQ(family["shape"], 3);
  EXPECT_EQ(family["firstorder"], 16);
  EXPECT_EQ(family["glcm"] + family["glrlm"] + family["glszm"] + family["gldm"] + family["ngtdm"], 74);
  for (const auto& id : excluded_size_features())
    EXPECT_EQ(std::count(roi_feature_ids().begin(), roi_feature_ids().end(), id), 0) << id;
}
