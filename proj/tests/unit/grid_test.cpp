#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thermoflow/grid.hpp"

using namespace thermoflow;

TEST(Grid, TwoUnitCells) {
  const auto g = build_grid(2, 1, 1, 2.0, 1.0, 1.0);
  ASSERT_EQ(g.num_facets(), 1);
  const auto& f = g.facets()[0];
  EXPECT_DOUBLE_EQ(f.area, 1.0);
  EXPECT_DOUBLE_EQ(f.center_distance, 1.0);
  EXPECT_EQ(f.axis, Axis::x);
  EXPECT_NE(f.cell_plus, f.cell_minus);
}

TEST(Grid, FacetCount) {
  EXPECT_EQ(build_grid(20, 20, 1, 50, 50, 1).num_facets(), 760);
  EXPECT_EQ(build_grid(1, 1, 1, 1, 1, 1).num_facets(), 0);
  for (auto [nx, ny, nz] : {std::tuple{3, 4, 5}, {1, 7, 2}, {6, 1, 1}}) {
    const auto g = build_grid(nx, ny, nz, 1, 2, 3);
    EXPECT_EQ(g.num_facets(), (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1));
    EXPECT_EQ(g.num_facets(), StructuredGrid::expected_facet_count(nx, ny, nz));
  }
}

TEST(Grid, RejectsBadArguments) {
  EXPECT_THROW(build_grid(0, 1, 1, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(build_grid(1, -2, 1, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(build_grid(1, 1, 1, 1, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(build_grid(1, 1, 1, -1, 1, 1), std::invalid_argument);
}

TEST(Grid, FacetGeometry) {
  const auto g = build_grid(3, 4, 2, 6.0, 2.0, 5.0);
  const auto h = g.spacing();
  EXPECT_DOUBLE_EQ(g.cell_volume(), 2.0 * 0.5 * 2.5);
  for (const auto& f : g.facets()) {
    const int a = static_cast<int>(f.axis);
    EXPECT_DOUBLE_EQ(f.center_distance, h[a]);
    EXPECT_DOUBLE_EQ(f.area, h[(a + 1) % 3] * h[(a + 2) % 3]);
    ASSERT_GE(f.cell_plus, 0);
    ASSERT_LT(f.cell_minus, g.num_cells());
    // normal points from plus to minus along the axis
    const auto cp = g.cell_center(f.cell_plus), cm = g.cell_center(f.cell_minus);
    EXPECT_NEAR(cm[a] - cp[a], h[a], 1e-12);
  }
}

TEST(Grid, FacetOrderIsAxisThenLexicographic) {
  const auto g = build_grid(3, 3, 3, 1, 1, 1);
  std::vector<std::pair<int, std::array<int, 3>>> keys;
  for (const auto& f : g.facets()) {
    const auto c = g.ijk(f.cell_plus);
    keys.push_back({static_cast<int>(f.axis), {c[2], c[1], c[0]}});
  }
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}

TEST(Grid, IndexRoundTrip) {
  const auto g = build_grid(4, 3, 2, 1, 1, 1);
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto [i, j, k] = g.ijk(c);
    EXPECT_EQ(g.index(i, j, k), c);
  }
  EXPECT_EQ(g.index(1, 0, 0), 1);
  EXPECT_EQ(g.index(0, 1, 0), 4);
  EXPECT_EQ(g.index(0, 0, 1), 12);
}

TEST(Grid, PermutedAxesGiveIsomorphicFacets) {
  const auto signature = [](const StructuredGrid& g) {
    std::vector<std::pair<double, double>> s;
    for (const auto& f : g.facets()) s.push_back({f.area, f.center_distance});
    std::sort(s.begin(), s.end());
    return s;
  };
  const auto a = build_grid(2, 3, 4, 1.0, 3.0, 8.0);
  const auto b = build_grid(4, 2, 3, 8.0, 1.0, 3.0);
  const auto sa = signature(a), sb = signature(b);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    EXPECT_NEAR(sa[i].first, sb[i].first, 1e-14);
    EXPECT_NEAR(sa[i].second, sb[i].second, 1e-14);
  }
}

TEST(HarmonicAverage, Examples) {
  EXPECT_DOUBLE_EQ(harmonic_average(2, 2), 2.0);
  EXPECT_DOUBLE_EQ(harmonic_average(1, 3), 1.5);
  EXPECT_DOUBLE_EQ(harmonic_average(0, 5), 0.0);
  EXPECT_DOUBLE_EQ(harmonic_average(0, 0), 0.0);
  EXPECT_THROW(harmonic_average(-1, 2), std::invalid_argument);
}

TEST(HarmonicAverage, BoundedAndSymmetric) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(1e-6, 1e3);
  for (int t = 0; t < 200; ++t) {
    const double a = u(rng), b = u(rng);
    const double h = harmonic_average(a, b);
    EXPECT_LE(std::min(a, b), h * (1 + 1e-15));
    EXPECT_GE(std::max(a, b), h * (1 - 1e-15));
    EXPECT_EQ(h, harmonic_average(b, a));
  }
}
