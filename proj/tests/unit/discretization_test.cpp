#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_models.hpp"
#include "thermoflow/sparse/dense.hpp"

using namespace thermoflow;
using namespace thermoflow::testing;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double abs_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

// cell owning each global row
std::vector<int> row_cells(const DofLayout& layout) {
  std::vector<int> c(layout.size());
  for (Field f : {Field::p, Field::T, Field::s})
    for (int cell = 0; cell < layout.num_cells(); ++cell) c[layout.row(f, cell)] = cell;
  return c;
}

}  // namespace

TEST(Upwind, TieTakesPlusSide) {
  const auto g = build_grid(2, 1, 1, 2, 1, 1);
  const std::vector<double> p = {1e7, 1e7};
  EXPECT_EQ(upwind_side(g.facets()[0], p, 1000.0, 0.0), Side::plus);
  const std::vector<double> q = {2e7, 1e7};
  EXPECT_EQ(upwind_side(g.facets()[0], q, 1000.0, 0.0), Side::plus);
  const std::vector<double> r = {1e7, 2e7};
  EXPECT_EQ(upwind_side(g.facets()[0], r, 1000.0, 0.0), Side::minus);
}

TEST(Upwind, GravityOnVerticalFacet) {
  const auto g = build_grid(1, 1, 2, 1, 1, 2);
  const auto& f = g.facets()[0];
  ASSERT_EQ(f.axis, Axis::z);
  const std::vector<double> p = {1e7, 1e7};
  // force = -rho g n_z with n_z = +1: flow goes down, from the upper (minus) cell
  EXPECT_DOUBLE_EQ(driving_force(f, 1e7, 1e7, 1000.0, 9.81), -1000.0 * 9.81);
  EXPECT_EQ(upwind_side(f, p, 1000.0, 9.81), Side::minus);
  // hydrostatic balance gives a zero force and the plus side
  const double dp = 1000.0 * 9.81 * f.center_distance;
  EXPECT_NEAR(driving_force(f, 1e7 + dp, 1e7, 1000.0, 9.81), 0.0, 1e-9);
}

TEST(Residual, UniformEquilibriumIsZero) {
  const auto m = square_model(4);
  const auto s = State::uniform(m.num_cells(), 2e7, 300.0, 0.7);
  const auto r = assemble_residual(m, s, s);
  for (const auto* v : {&r.F_w, &r.F_e, &r.F_o})
    for (double x : *v) EXPECT_EQ(x, 0.0);
}

TEST(Residual, TwoCellFluxIsAntisymmetric) {
  ReservoirModel m(build_grid(2, 1, 1, 2, 1, 1));
  State s = State::uniform(2, 1e7, 300.0, 0.5);
  s.p = {2e7, 1e7};
  const auto r = assemble_residual(m, s, s);
  EXPECT_GT(r.F_w[0], 0.0);
  EXPECT_LT(r.F_w[1], 0.0);
  EXPECT_NEAR(r.F_w[0] + r.F_w[1], 0.0, 1e-15 * std::abs(r.F_w[0]));
  EXPECT_NEAR(r.F_o[0] + r.F_o[1], 0.0, 1e-15 * std::abs(r.F_o[0]));
}

TEST(Residual, FluxesTelescope) {
  auto m = square_model(5);
  m.gravity = 9.81;
  const auto prev = perturbed(m.num_cells(), 1);
  const auto x = perturbed(m.num_cells(), 2);
  const auto r = assemble_residual(m, x, prev);
  const auto acc = assemble_accumulation(m, x, prev);
  for (auto [F, A] : {std::pair{&r.F_w, &acc.F_w}, std::pair{&r.F_o, &acc.F_o}}) {
    EXPECT_LE(std::abs(sum(*F) - sum(*A)), 1e-12 * (abs_sum(*F) + abs_sum(*A)));
  }
}

TEST(Weighting, PressureRowIsSum) {
  auto m = square_model(3);
  m.props.c_v_oil = m.props.c_v_water = 1.0;
  m.scaling.enabled = false;
  ResidualVector r{{1, 2, 3, 4, 5, 6, 7, 8, 9}, std::vector<double>(9, 0.5),
                   {9, 8, 7, 6, 5, 4, 3, 2, 1}};
  const auto w = apply_weighting_and_scaling(m, r);
  for (int i = 0; i < 9; ++i) {
    EXPECT_DOUBLE_EQ(w.F_p[i], r.F_w[i] + r.F_o[i]);
    EXPECT_DOUBLE_EQ(w.F_e[i], 0.5);
  }
  const ResidualVector zero{std::vector<double>(9), std::vector<double>(9), std::vector<double>(9)};
  EXPECT_EQ(apply_weighting_and_scaling(m, zero).norm2(), 0.0);
}

TEST(Weighting, ScalingLeavesNewtonStepUnchanged) {
  auto m = square_model(4);
  add_well_pair(m, 1e-5);
  const auto prev = State::uniform(m.num_cells(), 4.1369e7, 288.706, 0.9);
  const auto x = perturbed(m.num_cells(), 3, 1e5, 2.0, 0.02);
  const DofLayout layout(m.num_cells(), Ordering::field_wise);
  std::vector<double> step[2];
  for (int on = 0; on < 2; ++on) {
    m.scaling.enabled = on == 1;
    const auto lin = linearize(m, x, prev, layout);
    auto rhs = lin.residual;
    for (auto& v : rhs) v = -v;
    step[on] = dense_lu_solve(DenseMatrix::from_csr(lin.system.matrix), rhs);
  }
  for (Field f : {Field::p, Field::T, Field::s}) {
    double d = 0.0, n = 0.0;
    for (int r : layout.rows(f)) {
      d = std::max(d, std::abs(step[0][r] - step[1][r]));
      n = std::max(n, std::abs(step[1][r]));
    }
    EXPECT_LE(d, 1e-8 * n);
  }
}

TEST(Jacobian, MatchesFiniteDifferences) {
  auto m = square_model(4);
  add_well_pair(m, 2e-5);
  m.sources.push_back(heater_at(m, {20, 20, 0}, {30, 30, 1}, 10.0));
  const auto prev = State::uniform(m.num_cells(), 4.1369e7, 288.706, 0.9);
  // monotone pressure ramp plus noise keeps every facet far from an upwind switch
  State x = perturbed(m.num_cells(), 5, 1e4, 5.0, 0.05);
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto [i, j, k] = m.grid.ijk(c);
    x.p[c] += 2e5 * (i + 4 * j);
  }
  const DofLayout layout(m.num_cells(), Ordering::field_wise);
  const auto a = assemble_jacobian(m, x, prev, layout);
  const auto dense = DenseMatrix::from_csr(a.matrix);
  double worst = 0.0;
  for (Field f : {Field::p, Field::T, Field::s}) {
    const double floor = f == Field::p ? 1e5 : f == Field::T ? 1.0 : 1e-2;
    for (int c = 0; c < m.num_cells(); ++c) {
      State xp = x, xm = x;
      auto& vp = f == Field::p ? xp.p : f == Field::T ? xp.T : xp.s_o;
      auto& vm = f == Field::p ? xm.p : f == Field::T ? xm.T : xm.s_o;
      // saturation enters almost linearly, so a wider step costs little
      // truncation and keeps cancellation in the energy rows small
      const double h = (f == Field::s ? 1e-3 : 1e-4) * std::max(std::abs(vp[c]), floor);
      vp[c] += h;
      vm[c] -= h;
      const auto rp = packed_residual(m, layout, xp, prev);
      const auto rm = packed_residual(m, layout, xm, prev);
      const int col = layout.row(f, c);
      for (int r = 0; r < layout.size(); ++r) {
        double rowmax = 0.0;
        for (int k = 0; k < layout.size(); ++k) rowmax = std::max(rowmax, std::abs(dense(r, k)));
        const double fd = (rp[r] - rm[r]) / (2 * h);
        const double an = dense(r, col);
        const double scale = std::max({std::abs(fd), std::abs(an), 1e-8 * rowmax});
        const double e = std::abs(fd - an) / scale;
        worst = std::max(worst, e);
      }
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Jacobian, UniformStateHasNoSaturationCoupling) {
  const auto m = square_model(4);
  const auto s = State::uniform(m.num_cells(), 2e7, 300.0, 0.6);
  const DofLayout layout(m.num_cells(), Ordering::field_wise);
  const auto a = assemble_jacobian(m, s, s, layout);
  for (Field f : {Field::p, Field::s}) {
    const auto b = a.block(f, Field::s);
    for (int i = 0; i < b.rows(); ++i)
      for (int k = b.row_ptr()[i]; k < b.row_ptr()[i + 1]; ++k)
        if (b.col_idx()[k] != i) EXPECT_EQ(b.values()[k], 0.0);
  }
}

TEST(Jacobian, ZeroPermeabilityIsCellBlockDiagonal) {
  auto m = square_model(4);
  std::fill(m.perm_x.begin(), m.perm_x.end(), 0.0);
  std::fill(m.perm_y.begin(), m.perm_y.end(), 0.0);
  std::fill(m.perm_z.begin(), m.perm_z.end(), 0.0);
  // conduction still couples temperatures; make it negligible
  m.props.k_T_oil = m.props.k_T_water = m.props.k_T_rock = 1e-100;
  const auto prev = perturbed(m.num_cells(), 8);
  const auto x = perturbed(m.num_cells(), 9);
  const DofLayout layout(m.num_cells(), Ordering::field_wise);
  const auto a = assemble_jacobian(m, x, prev, layout);
  const auto cell = row_cells(layout);
  for (int r = 0; r < a.matrix.rows(); ++r) {
    const auto cols = a.matrix.row_cols(r);
    const auto vals = a.matrix.row_vals(r);
    double rowmax = 0.0;
    for (double v : vals) rowmax = std::max(rowmax, std::abs(v));
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cell[cols[k]] != cell[r]) EXPECT_LE(std::abs(vals[k]), 1e-80 * rowmax) << r << "," << cols[k];
  }
}

TEST(Layout, OrderingsArePermutationEquivalent) {
  auto m = square_model(4);
  add_well_pair(m, 1e-5);
  const auto prev = State::uniform(m.num_cells(), 4.1369e7, 288.706, 0.9);
  const auto x = perturbed(m.num_cells(), 10);
  const auto part = slab_partition(m.grid, 2);
  const DofLayout fw(m.num_cells(), Ordering::field_wise, part);
  const DofLayout ci(m.num_cells(), Ordering::cell_interleaved, part);
  const auto a = assemble_jacobian(m, x, prev, fw).matrix;
  const auto b = assemble_jacobian(m, x, prev, ci).matrix;
  // perm[fw row] = ci row
  std::vector<int> perm(fw.size());
  for (Field f : {Field::p, Field::T, Field::s})
    for (int c = 0; c < m.num_cells(); ++c) perm[fw.row(f, c)] = ci.row(f, c);
  ASSERT_EQ(a.nnz(), b.nnz());
  for (int r = 0; r < a.rows(); ++r)
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
      EXPECT_EQ(a.values()[k], b.coeff(perm[r], perm[a.col_idx()[k]]));
  // each subdomain holds a contiguous row range in both layouts
  EXPECT_EQ(fw.partition().offsets, ci.partition().offsets);
}

TEST(Layout, PackUnpackRoundTrip) {
  const DofLayout l(6, Ordering::cell_interleaved, {0, 0, 1, 1, 1, 0});
  const std::vector<double> p = {1, 2, 3, 4, 5, 6}, T = {7, 8, 9, 10, 11, 12},
                            s = {13, 14, 15, 16, 17, 18};
  const auto x = l.pack(p, T, s);
  std::vector<double> p2(6), T2(6), s2(6);
  l.unpack(x, p2, T2, s2);
  EXPECT_EQ(p, p2);
  EXPECT_EQ(T, T2);
  EXPECT_EQ(s, s2);
  EXPECT_EQ(l.partition().offsets, (std::vector<int>{0, 9, 18}));
}

TEST(Partition, SlabsAlongLongestAxis) {
  const auto g = build_grid(4, 8, 1, 10, 20, 1);
  const auto ids = slab_partition(g, 4);
  for (int c = 0; c < g.num_cells(); ++c) EXPECT_EQ(ids[c], g.ijk(c)[1] / 2);
  // ties go to x
  const auto cube = build_grid(4, 4, 4, 1, 1, 1);
  const auto t = slab_partition(cube, 2);
  for (int c = 0; c < cube.num_cells(); ++c) EXPECT_EQ(t[c], cube.ijk(c)[0] / 2);
}

TEST(Sources, BoxWeightsSumToOne) {
  const auto g = build_grid(10, 10, 1, 50, 50, 1);
  const auto cells = cells_in_box(g, {0, 0, 0}, {7.5, 2.5, 1});
  double w = 0.0;
  for (auto [c, x] : cells) w += x;
  EXPECT_NEAR(w, 1.0, 1e-15);
  EXPECT_EQ(cells.size(), 2u);  // a full cell and half of its neighbour
}

TEST(SchurApprox, NoAdvectionIsSymmetric) {
  auto m = square_model(4);
  std::fill(m.perm_x.begin(), m.perm_x.end(), 0.0);
  std::fill(m.perm_y.begin(), m.perm_y.end(), 0.0);
  std::fill(m.perm_z.begin(), m.perm_z.end(), 0.0);
  const auto x = perturbed(m.num_cells(), 12);
  const auto s = assemble_schur_approx(m, x);
  const auto st = s.transpose();
  for (int i = 0; i < s.rows(); ++i)
    for (int j : s.row_cols(i)) EXPECT_NEAR(s.coeff(i, j), st.coeff(i, j), 1e-12 * std::abs(s.coeff(i, i)));
}

TEST(SchurApprox, HeaterAddsUTimesWeight) {
  auto m = square_model(6);
  const auto x = perturbed(m.num_cells(), 13);
  const auto base = assemble_schur_approx(m, x);
  const double U = 37.0;
  m.sources.push_back(heater_at(m, {10, 10, 0}, {22, 22, 1}, U));
  const auto heated = assemble_schur_approx(m, x);
  std::vector<double> w(m.num_cells(), 0.0);
  for (auto [c, x] : m.sources[0].cells) w[c] += x;
  for (int c = 0; c < m.num_cells(); ++c)
    EXPECT_NEAR(heated.coeff(c, c) - base.coeff(c, c), U * w[c], 1e-9 * std::abs(base.coeff(c, c)));
}

TEST(Model, ValidateCatchesSizeMismatch) {
  auto m = square_model(3);
  EXPECT_NO_THROW(m.validate());
  m.phi.pop_back();
  EXPECT_ANY_THROW(m.validate());
}
