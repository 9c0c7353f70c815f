#include <gtest/gtest.h>

#include <random>

#include "oracle/naive_texture.hpp"
#include "rqvt/features/discretize.hpp"
#include "rqvt/features/texture_features.hpp"

using namespace rqvt;

namespace {

struct RandomCase {
  ScalarVolume volume;
  BinaryMask roi;
};

// Dims in [1,6]^3, ROI density varies per case, intensities on a 25 HU grid
// so that at most 4 gray levels appear.
RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 6);
  Geometry g;
  g.dims = {dim(rng), dim(rng), dim(rng)};
  ScalarVolume v(g);
  BinaryMask m(g);
  const double density = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  const int levels = std::uniform_int_distribution<int>(1, 4)(rng);
  std::uniform_int_distribution<int> lvl(0, levels - 1);
  std::bernoulli_distribution in(density);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v.data[i] = -40.0 + 25.0 * lvl(rng);
    m.data[i] = in(rng) ? 1 : 0;
  }
  if (is_empty(m)) m.data[0] = 1;
  return {v, m};
}

std::vector<naive::Voxel> voxels_of(const GrayLevelVolume& g) {
  std::vector<naive::Voxel> vs;
  const auto& geo = g.geometry();
  for (int z = 0; z < geo.dims[2]; ++z)
    for (int y = 0; y < geo.dims[1]; ++y)
      for (int x = 0; x < geo.dims[0]; ++x)
        if (g.levels(x, y, z)) vs.push_back({x, y, z, g.levels(x, y, z)});
  return vs;
}

void expect_matrix_eq(const Matrix2D& fast, const naive::Mat& slow, const char* what) {
  const int rows = static_cast<int>(slow.size());
  const int cols = static_cast<int>(slow.front().size());
  ASSERT_EQ(fast.rows, rows) << what;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < std::max(cols, fast.cols); ++c) {
      const double a = c < fast.cols ? fast(r, c) : 0.0;
      const double b = c < cols ? slow[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] : 0.0;
      ASSERT_NEAR(a, b, 1e-9) << what << " at (" << r << "," << c << ")";
    }
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

TEST(TextureOracle, MatricesAndFeaturesMatchNaiveEvaluator) {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = random_case(rng);
    const auto g = discretize(c.volume, c.roi, 25.0);
    ASSERT_LE(g.ng, 4);
    const auto vs = voxels_of(g);
    const int longest = std::max({g.geometry().dims[0], g.geometry().dims[1], g.geometry().dims[2]});
    const auto slow = naive::evaluate(vs, g.ng, longest);
    const auto fast = texture_analysis(g);

    for (std::size_t d = 0; d < 13; ++d) {
      expect_matrix_eq(fast.glcm[d], slow.glcm[d], "GLCM");
      expect_matrix_eq(fast.glrlm[d], slow.glrlm[d], "GLRLM");
    }
    expect_matrix_eq(fast.glszm, slow.glszm, "GLSZM");
    expect_matrix_eq(fast.gldm, slow.gldm, "GLDM");
    expect_matrix_eq(fast.ngtdm, slow.ngtdm, "NGTDM");

    ASSERT_EQ(fast.features.size(), 74u);
    ASSERT_EQ(slow.features.size(), 74u);
    for (std::size_t i = 0; i < 74; ++i)
      EXPECT_TRUE(close(fast.features.value(i), slow.features[i]))
          << "trial " << trial << " " << fast.features.id(i) << " fast=" << fast.features.value(i)
          << " naive=" << slow.features[i];
  }
}

TEST(TextureOracle, DegenerateRoisStayFinite) {
  Geometry geo;
  geo.dims = {3, 3, 3};
  for (int n : {1, 2, 27}) {
    ScalarVolume v(geo, 40.0);
    BinaryMask m(geo);
    for (int i = 0; i < n; ++i) m.data[static_cast<std::size_t>(i)] = 1;
    const auto f = texture_features(discretize(v, m));
    ASSERT_EQ(f.size(), 74u);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_TRUE(std::isfinite(f.value(i))) << f.id(i);
  }
}
