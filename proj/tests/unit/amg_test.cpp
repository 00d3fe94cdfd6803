#include <gtest/gtest.h>

#include <cmath>

#include "test_matrices.hpp"
#include "thermoflow/amg.hpp"
#include "thermoflow/sparse/dense.hpp"
#include "thermoflow/sparse/gmres.hpp"
#include "thermoflow/sparse/kernels.hpp"

using namespace thermoflow;
using namespace thermoflow::testing;

namespace {

double rel_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    n = std::max(n, std::abs(b[i]));
  }
  return d / n;
}

// block-diagonal 2x2 system of two Laplacians, optionally coupled by eps I
CsrMatrix two_field(int n, double eps) {
  const auto l = laplacian_2d(n);
  const int m = l.rows();
  std::vector<Triplet> t;
  for (int i = 0; i < m; ++i) {
    for (int k = l.row_ptr()[i]; k < l.row_ptr()[i + 1]; ++k) {
      t.push_back({i, l.col_idx()[k], l.values()[k]});
      t.push_back({m + i, m + l.col_idx()[k], 3.0 * l.values()[k]});
    }
    if (eps != 0.0) {
      t.push_back({i, m + i, eps});
      t.push_back({m + i, i, eps});
    }
  }
  return CsrMatrix::from_triplets(2 * m, 2 * m, std::move(t));
}

std::vector<int> two_labels(int m) {
  std::vector<int> lab(2 * m, 0);
  std::fill(lab.begin() + m, lab.end(), 1);
  return lab;
}

}  // namespace

TEST(Amg, DiagonalIsSingleLevel) {
  std::vector<Triplet> t;
  for (int i = 0; i < 200; ++i) t.push_back({i, i, 1.0 + i});
  const auto h = amg_setup(CsrMatrix::from_triplets(200, 200, t));
  EXPECT_EQ(h.num_levels(), 1);
}

TEST(Amg, Poisson1dCoarsensByTwo) {
  AmgParams p;
  p.coarse_size = 4;
  const auto h = amg_setup(laplacian_1d(64), p);
  ASSERT_GE(h.num_levels(), 3);
  const auto sizes = h.level_sizes();
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const double ratio = static_cast<double>(sizes[l - 1]) / sizes[l];
    EXPECT_GE(ratio, 2.0 - 0.1) << "level " << l;
    EXPECT_LE(ratio, 3.0) << "level " << l;
  }
}

TEST(Amg, Poisson2dGalerkinAndSymmetric) {
  const auto h = amg_setup(laplacian_2d(32));
  ASSERT_GE(h.num_levels(), 2);
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    const auto& lv = h.level(l);
    const auto rap = multiply(lv.R, multiply(lv.A, lv.P));
    const auto& ac = h.level(l + 1).A;
    const auto d = add(rap, ac, 1.0, -1.0);
    double scale = 0.0, err = 0.0;
    for (double v : ac.values()) scale = std::max(scale, std::abs(v));
    for (double v : d.values()) err = std::max(err, std::abs(v));
    EXPECT_LE(err, 1e-12 * scale) << "level " << l;
    const auto act = ac.transpose();
    for (int i = 0; i < ac.rows(); ++i)
      for (int j : ac.row_cols(i)) EXPECT_NEAR(ac.coeff(i, j), act.coeff(i, j), 1e-12 * scale);
  }
}

TEST(Amg, SingleLevelIsExact) {
  const auto a = laplacian_2d(6);
  const auto h = amg_setup(a);
  ASSERT_EQ(h.num_levels(), 1);
  const auto b = random_vector(a.rows(), 1);
  const auto x = amg_vcycle(h, b);
  std::vector<double> r(b.size());
  kernels::residual(a, x, b, r);
  EXPECT_LT(kernels::norm2(r), 1e-12 * kernels::norm2(b));
}

TEST(Amg, LinearAndRepeatable) {
  const auto a = laplacian_2d(24);
  const auto h = amg_setup(a);
  const auto b = random_vector(a.rows(), 2);
  auto b3 = b;
  for (auto& v : b3) v *= -3.5;
  const auto x = amg_vcycle(h, b), x3 = amg_vcycle(h, b3), again = amg_vcycle(h, b);
  EXPECT_EQ(x, again);
  std::vector<double> want(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) want[i] = -3.5 * x[i];
  EXPECT_LT(rel_diff(x3, want), 1e-12);
}

TEST(Amg, MeshIndependentAsPreconditioner) {
  for (int n : {32, 64}) {
    const auto a = laplacian_2d(n);
    const auto h = amg_setup(a);
    const auto r = gmres(a, random_vector(a.rows(), 5), h);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 15) << n;
  }
}

TEST(Amg, CycleReducesEnergyError) {
  const auto a = laplacian_2d(20);
  const int n = a.rows();
  const auto h = amg_setup(a);
  const auto b = random_vector(n, 6);
  const auto x_true = dense_lu_solve(DenseMatrix::from_csr(a), b);
  const auto x = amg_vcycle(h, b);
  const auto energy = [&](std::span<const double> e) {
    std::vector<double> ae(n);
    kernels::spmv(a, e, ae);
    return std::sqrt(kernels::dot(e, ae));
  };
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) e[i] = x_true[i] - x[i];
  EXPECT_LT(energy(e), energy(x_true));
}

TEST(Amg, RejectsBadParams) {
  AmgParams p;
  p.theta = 1.5;
  EXPECT_THROW(p.validate(), std::exception);
  p.theta = 0.25;
  p.coarse_size = 0;
  EXPECT_THROW(p.validate(), std::exception);
}

TEST(Uamg, DecoupledMatchesScalarCycles) {
  const int n = 16, m = n * n;
  const auto a = two_field(n, 0.0);
  AmgParams p;
  p.coarse_size = 20;
  const auto hu = uamg_setup(a, two_labels(m), p);
  const auto app = laplacian_2d(n);
  std::vector<Triplet> t;
  for (int i = 0; i < m; ++i)
    for (int k = app.row_ptr()[i]; k < app.row_ptr()[i + 1]; ++k)
      t.push_back({i, app.col_idx()[k], 3.0 * app.values()[k]});
  const auto att = CsrMatrix::from_triplets(m, m, t);
  const auto hp = amg_setup(app, p), ht = amg_setup(att, p);

  const auto b = random_vector(2 * m, 7);
  const auto x = amg_vcycle(hu, b);
  const auto xp = amg_vcycle(hp, std::span(b).first(m));
  const auto xt = amg_vcycle(ht, std::span(b).subspan(m));
  EXPECT_LT(rel_diff(std::span(x).first(m), xp), 1e-12);
  EXPECT_LT(rel_diff(std::span(x).subspan(m), xt), 1e-12);
}

TEST(Uamg, CoarseKeepsBlockStructure) {
  const int n = 16, m = n * n;
  AmgParams p;
  p.coarse_size = 20;
  const auto h = uamg_setup(two_field(n, 0.1), two_labels(m), p);
  ASSERT_GE(h.num_levels(), 2);
  const auto& c = h.level(1);
  int np = 0;
  for (int lab : c.labels) np += lab == 0;
  EXPECT_GT(np, 0);
  EXPECT_LT(np, c.A.rows());
  // every coarse row has same-label and cross-label entries
  bool saw_cross = false;
  for (int i = 0; i < c.A.rows(); ++i) {
    bool same = false;
    for (int j : c.A.row_cols(i)) {
      if (c.labels[j] == c.labels[i]) same = true;
      else saw_cross = true;
    }
    EXPECT_TRUE(same);
  }
  EXPECT_TRUE(saw_cross);
}

TEST(Uamg, ZeroRhsGivesZero) {
  const int n = 12;
  const auto h = uamg_setup(two_field(n, 0.2), two_labels(n * n));
  const std::vector<double> b(2 * n * n, 0.0);
  for (double v : amg_vcycle(h, b)) EXPECT_EQ(v, 0.0);
}
