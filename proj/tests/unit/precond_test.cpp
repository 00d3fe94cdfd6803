#include <gtest/gtest.h>

#include <cmath>

#include "test_matrices.hpp"
#include "test_models.hpp"
#include "thermoflow/precond.hpp"
#include "thermoflow/sparse/dense.hpp"
#include "thermoflow/sparse/gmres.hpp"
#include "thermoflow/sparse/ilu.hpp"
#include "thermoflow/sparse/kernels.hpp"

using namespace thermoflow;
using namespace thermoflow::testing;

namespace {

struct Linearized {
  ReservoirModel model;
  BlockSystem sys;
  CsrMatrix schur;
};

// heater + well pair on a 6x6 square, away from equilibrium
Linearized heater_system(int n = 6) {
  auto m = square_model(n);
  add_well_pair(m, 2e-5);
  m.sources.push_back(heater_at(m, {20, 20, 0}, {30, 30, 1}, 10.0));
  const auto prev = State::uniform(m.num_cells(), 4.1369e7, 288.706, 0.9);
  const auto x = perturbed(m.num_cells(), 21, 1e5, 3.0, 0.03);
  const DofLayout layout(m.num_cells(), Ordering::field_wise);
  auto sys = assemble_jacobian(m, x, prev, layout);
  auto s = assemble_schur_approx(m, x);
  return {std::move(m), std::move(sys), std::move(s)};
}

double rel_err(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    n = std::max(n, std::abs(b[i]));
  }
  return d / n;
}

std::vector<double> run_op(const LinearOperator& op, std::span<const double> b) {
  std::vector<double> x(b.size());
  op.apply(b, x);
  return x;
}

// [A_pp 0; 0 A_TT] from two random dominant blocks
CsrMatrix block_diag(int n, unsigned seed) {
  const auto a = random_dominant(n, seed, 0.3), b = random_dominant(n, seed + 1, 0.3);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) t.push_back({i, a.col_idx()[k], a.values()[k]});
    for (int k = b.row_ptr()[i]; k < b.row_ptr()[i + 1]; ++k)
      t.push_back({n + i, n + b.col_idx()[k], b.values()[k]});
  }
  return CsrMatrix::from_triplets(2 * n, 2 * n, std::move(t));
}

}  // namespace

TEST(Variants, ParseKnownNames) {
  for (const auto& v : variant_names()) EXPECT_NO_THROW(parse_variant(v)) << v;
  const auto cpr = parse_variant("cpr-amg");
  EXPECT_EQ(cpr.stage_one.restriction, Restriction::pressure);
  EXPECT_EQ(cpr.stage_one.solver, StageSolver::amg_vcycle);
  EXPECT_EQ(parse_variant("cpr-amg-ilu1").ilu_level, 1);
  EXPECT_EQ(parse_variant("cptr-uamg-ti").stage_one.decouple, Decoupling::true_impes);
  EXPECT_EQ(parse_variant("cptr-block-lu").stage_one.sub_solve, SubSolve::lu);
  EXPECT_EQ(parse_variant("cptr-bd-amg").stage_one.solver, StageSolver::block_diag);
  EXPECT_ANY_THROW(parse_variant("cpr-magic"));
  EXPECT_ANY_THROW(parse_decoupling("full"));
  EXPECT_EQ(parse_order("ilu-first"), StageOrder::ilu_first);
}

TEST(TwoStage, ExactFirstStage) {
  const auto a = random_dominant(30, 3, 0.3);
  auto m1 = std::make_shared<DenseLu>(a);
  auto m2 = std::make_shared<IluPreconditioner>(a, 0);
  const TwoStagePreconditioner tp(a, m1, m2);
  const auto b = random_vector(30, 4);
  EXPECT_LT(rel_err(run_op(tp, b), m1->solve(b)), 1e-12);
}

TEST(TwoStage, ZeroFirstStageExactSecond) {
  const auto a = random_dominant(30, 5, 0.3);
  auto m2 = std::make_shared<DenseLu>(a);
  const TwoStagePreconditioner tp(a, std::make_shared<ZeroOperator>(30), m2);
  const auto b = random_vector(30, 6);
  EXPECT_LT(rel_err(run_op(tp, b), m2->solve(b)), 1e-12);
}

TEST(TwoStage, OneApplicationOfEachStagePerCall) {
  const auto a = random_dominant(20, 7, 0.3);
  for (StageOrder o : {StageOrder::restricted_first, StageOrder::ilu_first}) {
    const TwoStagePreconditioner tp(a, std::make_shared<IluPreconditioner>(a, 0),
                                    std::make_shared<IdentityOperator>(20), o);
    const auto b = random_vector(20, 8);
    for (int k = 0; k < 3; ++k) run_op(tp, b);
    EXPECT_EQ(tp.first_stage_applications(), 3);
    EXPECT_EQ(tp.second_stage_applications(), 3);
  }
}

TEST(TwoStage, EveryVariantIsLinear) {
  const auto L = heater_system();
  const int n = L.sys.matrix.rows();
  const auto b1 = random_vector(n, 9), b2 = random_vector(n, 10);
  std::vector<double> combo(n);
  for (int i = 0; i < n; ++i) combo[i] = 2.0 * b1[i] - 0.5 * b2[i];
  for (const auto& v : variant_names()) {
    for (StageOrder o : {StageOrder::restricted_first, StageOrder::ilu_first}) {
      auto spec = parse_variant(v);
      spec.order = o;
      const auto pc = build_preconditioner(spec, L.sys, &L.schur);
      const auto x1 = run_op(*pc, b1), x2 = run_op(*pc, b2), xc = run_op(*pc, combo);
      std::vector<double> want(n);
      for (int i = 0; i < n; ++i) want[i] = 2.0 * x1[i] - 0.5 * x2[i];
      EXPECT_LT(rel_err(xc, want), 1e-12) << v;
      EXPECT_EQ(run_op(*pc, b1), x1) << v;
    }
  }
}

TEST(FirstStage, ZeroInputGivesZero) {
  const auto L = heater_system();
  const int n = L.sys.matrix.rows();
  const std::vector<double> zero(n, 0.0);
  for (const auto& v : variant_names()) {
    const auto pc = build_preconditioner(parse_variant(v), L.sys, &L.schur);
    for (double x : run_op(pc->first_stage(), zero)) EXPECT_EQ(x, 0.0) << v;
  }
}

TEST(FirstStage, ExactCprSolvesPressureRows) {
  const auto L = heater_system();
  const auto& a = L.sys.matrix;
  const int n = a.rows();
  auto spec = parse_variant("cpr-lu");
  spec.stage_one.decouple = Decoupling::none;
  const auto pc = build_preconditioner(spec, L.sys, &L.schur);
  const auto b = random_vector(n, 11);
  const auto x1 = run_op(pc->first_stage(), b);
  std::vector<double> r(n);
  kernels::serial::residual(a, x1, b, r);
  // normwise backward error of the pressure solve
  const auto app = L.sys.block(Field::p, Field::p);
  double rp = 0.0, bp = 0.0, xp = 0.0, anorm = 0.0;
  for (int i = 0; i < app.rows(); ++i) {
    double rs = 0.0;
    for (double v : app.row_vals(i)) rs += std::abs(v);
    anorm = std::max(anorm, rs);
  }
  for (int row : L.sys.layout.rows(Field::p)) {
    rp = std::max(rp, std::abs(r[row]));
    bp = std::max(bp, std::abs(b[row]));
    xp = std::max(xp, std::abs(x1[row]));
  }
  EXPECT_LT(rp, 1e-12 * (anorm * xp + bp));
  for (Field f : {Field::T, Field::s})
    for (int row : L.sys.layout.rows(f)) EXPECT_EQ(x1[row], 0.0);
}

TEST(BlockSchur, UncoupledIsExactInverse) {
  const int n = 15;
  const auto a00 = block_diag(n, 12);
  const auto att = a00.diagonal_block(n, 2 * n);
  const BlockSchurOperator bs(a00, att, SubSolve::lu);
  const auto b = random_vector(2 * n, 13);
  EXPECT_LT(rel_err(run_op(bs, b), DenseLu(a00).solve(b)), 1e-12);
  const std::vector<double> zero(2 * n, 0.0);
  for (double x : run_op(bs, zero)) EXPECT_EQ(x, 0.0);
}

TEST(BlockDiagonal, UncoupledIsExactInverse) {
  const int n = 15;
  const auto a00 = block_diag(n, 14);
  const BlockDiagonalOperator bd(a00, SubSolve::lu);
  const auto b = random_vector(2 * n, 15);
  EXPECT_LT(rel_err(run_op(bd, b), DenseLu(a00).solve(b)), 1e-12);
}

TEST(Decoupling, ZeroCouplingGivesZeroOperator) {
  auto L = heater_system(4);
  auto& a = L.sys.matrix;
  const auto& lay = L.sys.layout;
  // wipe A_pT and A_ps
  std::vector<char> is_p(a.rows(), 0);
  for (int r : lay.rows(Field::p)) is_p[r] = 1;
  std::vector<Triplet> t;
  for (int r = 0; r < a.rows(); ++r)
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
      if (!is_p[r] || is_p[a.col_idx()[k]]) t.push_back({r, a.col_idx()[k], a.values()[k]});
  const BlockSystem sys{CsrMatrix::from_triplets(a.rows(), a.cols(), t), lay};
  for (Decoupling kind : {Decoupling::quasi_impes, Decoupling::true_impes}) {
    const auto rs = restricted_system(sys, Restriction::pressure, kind);
    for (double v : rs.decoupling.D.values()) EXPECT_EQ(v, 0.0);
    const auto app = sys.block(Field::p, Field::p);
    ASSERT_EQ(rs.matrix.rows(), app.rows());
    for (int i = 0; i < app.rows(); ++i)
      for (int j : app.row_cols(i)) EXPECT_EQ(rs.matrix.coeff(i, j), app.coeff(i, j));
  }
}

TEST(Decoupling, QuasiImpesCancelsCellBlocks) {
  const auto L = heater_system(5);
  const auto& lay = L.sys.layout;
  const int n = lay.num_cells();
  const auto d = decoupling_operator(L.sys, Restriction::pressure, Decoupling::quasi_impes);
  EXPECT_TRUE(d.singular_cells.empty());
  const auto aps = L.sys.block({Field::p}, {Field::T, Field::s});
  const auto ass = L.sys.block({Field::T, Field::s}, {Field::T, Field::s});
  const auto diff = add(aps, multiply(d.D, ass), 1.0, -1.0);
  for (int c = 0; c < n; ++c)
    for (int m = 0; m < 2; ++m) {
      const double scale = std::max(std::abs(aps.coeff(c, m * n + c)), 1e-300);
      EXPECT_LT(std::abs(diff.coeff(c, m * n + c)), 1e-13 * scale);
    }
}

TEST(Solve, CoupledSystemConvergesWithEveryVariant) {
  const auto L = heater_system();
  const auto b = random_vector(L.sys.matrix.rows(), 16);
  for (const auto& v : variant_names()) {
    const auto pc = build_preconditioner(parse_variant(v), L.sys, &L.schur);
    const auto r = gmres(L.sys.matrix, b, *pc);
    EXPECT_TRUE(r.converged) << v;
    EXPECT_LT(r.iterations, 40) << v;
  }
}

TEST(Spec, ValidateRejectsInconsistentCombos) {
  auto s = parse_variant("cpr-amg");
  s.stage_one.solver = StageSolver::block_schur;  // needs the p-T restriction
  EXPECT_ANY_THROW(s.validate(true));
}
