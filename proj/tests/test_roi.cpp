#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rqvt/roi.hpp"

using namespace rqvt;

namespace {

Geometry cube(int n, double spacing = 1.0) {
  Geometry g;
  g.dims = {n, n, n};
  g.spacing = {spacing, spacing, spacing};
  return g;
}

BinaryMask random_mask(std::mt19937_64& rng, const Geometry& g, double density) {
  BinaryMask m(g);
  std::bernoulli_distribution b(density);
  for (auto& x : m.data) x = b(rng) ? 1 : 0;
  return m;
}

// Distance to the nearest foreground voxel center by exhaustive search.
double brute_distance(const BinaryMask& m, const Index3& p) {
  double best = std::numeric_limits<double>::infinity();
  const auto& g = m.geometry;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m.data[i]) continue;
    const Index3 q = g.unravel(i);
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d = (p[a] - q[a]) * g.spacing[a];
      d2 += d * d;
    }
    best = std::min(best, d2);
  }
  return std::sqrt(best);
}

}  // namespace

TEST(DistanceMap, SingleVoxel) {
  BinaryMask m(cube(5));
  m(2, 2, 2) = 1;
  const auto d = distance_map(m);
  EXPECT_EQ(d(2, 2, 2), 0.0);
  EXPECT_EQ(d(3, 2, 2), 1.0);
  EXPECT_DOUBLE_EQ(d(3, 3, 2), std::sqrt(2.0));

  BinaryMask s(cube(5, 0.75));
  s(0, 0, 0) = 1;
  EXPECT_DOUBLE_EQ(distance_map(s)(2, 0, 0), 1.5);
  EXPECT_THROW(distance_map(BinaryMask(cube(3))), Error);
}

TEST(DistanceMap, EqualsBruteForceOnSmallMasks) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> sp(0.5, 2.0);
  for (int t = 0; t < 300; ++t) {
    Geometry g;
    g.dims = {dim(rng), dim(rng), dim(rng)};
    g.spacing = {sp(rng), sp(rng), sp(rng)};
    auto m = random_mask(rng, g, std::uniform_real_distribution<double>(0.01, 0.3)(rng));
    if (is_empty(m)) m.data[rng() % m.size()] = 1;
    const auto d = distance_map(m);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_EQ(d.data[i], brute_distance(m, g.unravel(i))) << "case " << t;
  }
}

TEST(Dilate, SingleVoxelTwoMillimetres) {
  BinaryMask m(cube(11, 0.75));
  m(5, 5, 5) = 1;
  EXPECT_EQ(count_foreground(dilate_mask(m, 2.0)), 81u);
  EXPECT_EQ(count_foreground(boundary_band(m, 2.0)), 80u);
}

TEST(Dilate, IdentityAndFixedPoint) {
  std::mt19937_64 rng(5);
  const auto m = random_mask(rng, cube(6), 0.2);
  EXPECT_EQ(dilate_mask(m, 0.0), m);
  const BinaryMask full(cube(4), 1);
  EXPECT_EQ(dilate_mask(full, 3.0), full);
  EXPECT_THROW(dilate_mask(m, -1.0), Error);
}

TEST(Band, DisjointFromLesionAndMatchesCounts) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    auto m = random_mask(rng, cube(7, 0.75), 0.1);
    if (is_empty(m)) m.data[0] = 1;
    const auto band = boundary_band(m, 2.0);
    EXPECT_EQ(count_foreground(mask_intersection(band, m)), 0u);
  }
  BinaryMask ball(cube(21));
  for (int z = 0; z < 21; ++z)
    for (int y = 0; y < 21; ++y)
      for (int x = 0; x < 21; ++x)
        if ((x - 10) * (x - 10) + (y - 10) * (y - 10) + (z - 10) * (z - 10) <= 25) ball(x, y, z) = 1;
  EXPECT_EQ(count_foreground(boundary_band(ball, 2.0)), count_foreground(dilate_mask(ball, 2.0)) - count_foreground(ball));
  EXPECT_THROW(boundary_band(BinaryMask(cube(3)), 2.0), Error);
}

TEST(Band, SymmetricModeStraddlesTheBoundary) {
  BinaryMask ball(cube(21));
  for (int z = 0; z < 21; ++z)
    for (int y = 0; y < 21; ++y)
      for (int x = 0; x < 21; ++x)
        if ((x - 10) * (x - 10) + (y - 10) * (y - 10) + (z - 10) * (z - 10) <= 36) ball(x, y, z) = 1;
  const auto band = boundary_band(ball, 2.0, BandMode::Symmetric);
  EXPECT_GT(count_foreground(mask_intersection(band, ball)), 0u);
  EXPECT_GT(count_foreground(mask_difference(band, ball)), 0u);
  EXPECT_EQ(band(10, 10, 10), 0);
}

TEST(Components, Connectivity) {
  BinaryMask m(cube(4));
  m(0, 0, 0) = 1;
  m(3, 3, 3) = 1;
  auto cc = connected_components(m, 26);
  EXPECT_EQ(cc.count(), 2);
  EXPECT_EQ(cc.sizes, (std::vector<std::size_t>{1, 1}));

  BinaryMask d(cube(3));
  d(0, 0, 0) = 1;
  d(1, 1, 1) = 1;
  EXPECT_EQ(connected_components(d, 26).count(), 1);
  EXPECT_EQ(connected_components(d, 18).count(), 2);
  EXPECT_EQ(connected_components(d, 6).count(), 2);
  EXPECT_EQ(connected_components(BinaryMask(cube(3)), 26).count(), 0);
}

TEST(Recist, Diameters) {
  Geometry g;
  g.dims = {25, 3, 2};
  g.spacing = {0.75, 0.75, 2.0};
  BinaryMask m(g);
  m(2, 1, 0) = 1;
  m(22, 1, 0) = 1;
  EXPECT_DOUBLE_EQ(recist_diameter(m), 15.0);

  BinaryMask one(g);
  one(3, 1, 1) = 1;
  EXPECT_EQ(recist_diameter(one), 0.0);

  Geometry d;
  d.dims = {25, 25, 1};
  d.spacing = {0.75, 0.75, 0.75};
  BinaryMask disk(d);
  for (int y = 0; y < 25; ++y)
    for (int x = 0; x < 25; ++x)
      if ((x - 12) * (x - 12) + (y - 12) * (y - 12) <= 100) disk(x, y, 0) = 1;
  EXPECT_NEAR(recist_diameter(disk), 15.0, 0.75);
}

TEST(ShrinkageLabel, Boundaries) {
  const DiameterRecord base{"L", 0, 30.0};
  EXPECT_EQ(shrinkage_label(base, {{"L", 1, 25.0}, {"L", 2, 20.0}}), 1);
  EXPECT_EQ(shrinkage_label(base, {{"L", 1, 22.5}}), 0);
  EXPECT_EQ(shrinkage_label(base, {{"L", 1, 21.0}}), 1);
  EXPECT_THROW(shrinkage_label(base, {}), Error);
  EXPECT_THROW(shrinkage_label({"L", 0, 0.0}, {{"L", 1, 1.0}}), Error);
}
