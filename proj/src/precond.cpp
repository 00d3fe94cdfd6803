#include "thermoflow/precond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <array>
#include <numeric>

#include "thermoflow/sparse/direct.hpp"
#include "thermoflow/sparse/ilu.hpp"

namespace thermoflow {

namespace {

std::vector<Field> primary_fields(Restriction r) {
  return r == Restriction::pressure ? std::vector<Field>{Field::p}
                                    : std::vector<Field>{Field::p, Field::T};
}

std::vector<Field> secondary_fields(Restriction r) {
  return r == Restriction::pressure ? std::vector<Field>{Field::T, Field::s}
                                    : std::vector<Field>{Field::s};
}

std::vector<int> rows_of(const DofLayout& l, const std::vector<Field>& fields) {
  std::vector<int> out;
  for (Field f : fields) out.insert(out.end(), l.rows(f).begin(), l.rows(f).end());
  return out;
}

std::shared_ptr<const LinearOperator> scalar_solver(const CsrMatrix& a, SubSolve sub,
                                                    const AmgParams& amg) {
  if (sub == SubSolve::lu) return std::make_shared<SparseDirectSolver>(a);
  return std::make_shared<AmgHierarchy>(amg_setup(a, amg));
}

/// Inverse of a 1x1 or 2x2 block; false when singular relative to its scale.
bool invert_small(int m, const double* a, double* inv) {
  if (m == 1) {
    if (a[0] == 0.0 || !std::isfinite(a[0])) return false;
    inv[0] = 1.0 / a[0];
    return true;
  }
  const double det = a[0] * a[3] - a[1] * a[2];
  const double scale = std::max({std::abs(a[0] * a[3]), std::abs(a[1] * a[2])});
  if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(det)) return false;
  inv[0] = a[3] / det;
  inv[1] = -a[1] / det;
  inv[2] = -a[2] / det;
  inv[3] = a[0] / det;
  return true;
}

std::string solver_name(const StageOneSpec& s) {
  std::string r = s.restriction == Restriction::pressure ? "pressure" : "pressure-temperature";
  switch (s.solver) {
    case StageSolver::amg_vcycle: return r + " amg";
    case StageSolver::dense_lu: return r + " lu";
    case StageSolver::block_schur: return r + " block-schur";
    case StageSolver::uamg: return r + " uamg";
    case StageSolver::block_diag: return r + " block-diagonal";
  }
  return r;
}

}  // namespace

void StageOneSpec::validate() const {
  const bool cpr = restriction == Restriction::pressure;
  if (solver == StageSolver::amg_vcycle && !cpr)
    throw std::invalid_argument("precond: scalar amg applies to the pressure restriction only");
  if ((solver == StageSolver::block_schur || solver == StageSolver::uamg ||
       solver == StageSolver::block_diag) &&
      cpr)
    throw std::invalid_argument("precond: block solvers need the pressure-temperature restriction");
  if (solver == StageSolver::block_schur && decouple != Decoupling::none)
    throw std::invalid_argument("precond: the block-schur first stage cannot be decoupled");
}

void TwoStageSpec::validate(bool scaling_enabled) const {
  stage_one.validate();
  amg.validate();
  if (ilu_level < 0) throw std::invalid_argument("precond: ILU level must be >= 0");
  if (order == StageOrder::ilu_first && !scaling_enabled)
    throw std::invalid_argument("precond: ilu-first ordering requires equation scaling");
}

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {
      "cpr-amg",        "cpr-lu",         "cpr-amg-ilu1", "cpr-amg-ti",  "cptr-block-amg",
      "cptr-block-lu",  "cptr-uamg",      "cptr-uamg-ti", "cptr-bd-lu",  "cptr-bd-amg",
      "cptr-lu"};
  return names;
}

TwoStageSpec parse_variant(const std::string& name) {
  TwoStageSpec s;
  auto& one = s.stage_one;
  const auto cptr = [&](StageSolver solver, SubSolve sub) {
    one.restriction = Restriction::pressure_temperature;
    one.solver = solver;
    one.sub_solve = sub;
  };
  if (name == "cpr-amg") {
  } else if (name == "cpr-lu") {
    one.solver = StageSolver::dense_lu;
  } else if (name == "cpr-amg-ilu1") {
    s.ilu_level = 1;
  } else if (name == "cpr-amg-ti") {
    one.decouple = Decoupling::true_impes;
  } else if (name == "cptr-block-amg") {
    cptr(StageSolver::block_schur, SubSolve::amg);
  } else if (name == "cptr-block-lu") {
    cptr(StageSolver::block_schur, SubSolve::lu);
  } else if (name == "cptr-uamg") {
    cptr(StageSolver::uamg, SubSolve::amg);
  } else if (name == "cptr-uamg-ti") {
    cptr(StageSolver::uamg, SubSolve::amg);
    one.decouple = Decoupling::true_impes;
  } else if (name == "cptr-bd-lu") {
    cptr(StageSolver::block_diag, SubSolve::lu);
  } else if (name == "cptr-bd-amg") {
    cptr(StageSolver::block_diag, SubSolve::amg);
  } else if (name == "cptr-lu") {
    cptr(StageSolver::dense_lu, SubSolve::lu);
  } else {
    std::string known;
    for (const auto& n : variant_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preconditioner variant '" + name + "' (known: " + known +
                                ")");
  }
  return s;
}

Decoupling parse_decoupling(const std::string& s) {
  if (s == "none") return Decoupling::none;
  if (s == "qi" || s == "quasi-impes") return Decoupling::quasi_impes;
  if (s == "ti" || s == "true-impes") return Decoupling::true_impes;
  throw std::invalid_argument("unknown decoupling '" + s + "' (expected none, qi or ti)");
}

StageOrder parse_order(const std::string& s) {
  if (s == "restricted-first") return StageOrder::restricted_first;
  if (s == "ilu-first") return StageOrder::ilu_first;
  throw std::invalid_argument("unknown stage order '" + s +
                              "' (expected restricted-first or ilu-first)");
}

std::string to_string(Decoupling d) {
  switch (d) {
    case Decoupling::none: return "none";
    case Decoupling::quasi_impes: return "qi";
    case Decoupling::true_impes: return "ti";
  }
  return "?";
}

std::string to_string(StageOrder o) {
  return o == StageOrder::restricted_first ? "restricted-first" : "ilu-first";
}

DecouplingOperator decoupling_operator(const BlockSystem& a, Restriction r, Decoupling kind) {
  const auto& layout = a.layout;
  const int n = layout.num_cells();
  const auto prim = primary_fields(r);
  const auto sec = secondary_fields(r);
  const int np = static_cast<int>(prim.size()), ns = static_cast<int>(sec.size());
  DecouplingOperator out;
  if (kind == Decoupling::none) {
    out.D = CsrMatrix(np * n, ns * n, std::vector<int>(np * n + 1, 0), {}, {});
    return out;
  }

  // Per cell: B_ps (np x ns) and B_ss (ns x ns), row-major.
  std::vector<double> bps(static_cast<std::size_t>(n) * np * ns, 0.0);
  std::vector<double> bss(static_cast<std::size_t>(n) * ns * ns, 0.0);
  const auto& A = a.matrix;
  if (kind == Decoupling::quasi_impes) {
    for (int c = 0; c < n; ++c) {
      for (int k = 0; k < np; ++k)
        for (int m = 0; m < ns; ++m)
          bps[(c * np + k) * ns + m] = A.coeff(layout.row(prim[k], c), layout.row(sec[m], c));
      for (int q = 0; q < ns; ++q)
        for (int m = 0; m < ns; ++m)
          bss[(c * ns + q) * ns + m] = A.coeff(layout.row(sec[q], c), layout.row(sec[m], c));
    }
  } else {
    // Column sums of each block column: rows summed over all cells of a field.
    std::vector<int> field_of(layout.size()), cell_of(layout.size());
    for (int f = 0; f < 3; ++f)
      for (int c = 0; c < n; ++c) {
        const int row = layout.row(static_cast<Field>(f), c);
        field_of[row] = f;
        cell_of[row] = c;
      }
    std::array<int, 3> prim_slot{-1, -1, -1}, sec_slot{-1, -1, -1};
    for (int k = 0; k < np; ++k) prim_slot[static_cast<int>(prim[k])] = k;
    for (int m = 0; m < ns; ++m) sec_slot[static_cast<int>(sec[m])] = m;
    for (int row = 0; row < A.rows(); ++row) {
      const int fr = field_of[row];
      const auto cols = A.row_cols(row);
      const auto vals = A.row_vals(row);
      for (std::size_t q = 0; q < cols.size(); ++q) {
        const int m = sec_slot[field_of[cols[q]]];
        if (m < 0) continue;
        const int c = cell_of[cols[q]];
        if (prim_slot[fr] >= 0)
          bps[(c * np + prim_slot[fr]) * ns + m] += vals[q];
        else
          bss[(c * ns + sec_slot[fr]) * ns + m] += vals[q];
      }
    }
  }

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * np * ns);
  std::vector<double> inv(ns * ns);
  for (int c = 0; c < n; ++c) {
    if (!invert_small(ns, &bss[c * ns * ns], inv.data())) {
      out.singular_cells.push_back(c);
      continue;
    }
    for (int k = 0; k < np; ++k)
      for (int m = 0; m < ns; ++m) {
        double v = 0.0;
        for (int q = 0; q < ns; ++q) v += bps[(c * np + k) * ns + q] * inv[q * ns + m];
        t.push_back({k * n + c, m * n + c, v});
      }
  }
  out.D = CsrMatrix::from_triplets(np * n, ns * n, std::move(t));
  return out;
}

RestrictedSystem restricted_system(const BlockSystem& a, Restriction r, Decoupling kind) {
  const auto prim = rows_of(a.layout, primary_fields(r));
  RestrictedSystem out;
  out.decoupling = decoupling_operator(a, r, kind);
  CsrMatrix app = a.matrix.extract(prim, prim);
  if (kind == Decoupling::none) {
    out.matrix = std::move(app);
    return out;
  }
  const auto sec = rows_of(a.layout, secondary_fields(r));
  const CsrMatrix asp = a.matrix.extract(sec, prim);
  out.matrix = add(app, multiply(out.decoupling.D, asp), 1.0, -1.0);
  out.decoupled = true;
  return out;
}

BlockSchurOperator::BlockSchurOperator(const CsrMatrix& a00,
                                       std::shared_ptr<const LinearOperator> app_inv,
                                       std::shared_ptr<const LinearOperator> schur_inv)
    : n_(a00.rows() / 2), app_inv_(std::move(app_inv)), schur_inv_(std::move(schur_inv)) {
  if (a00.rows() != 2 * n_ || a00.cols() != a00.rows())
    throw std::invalid_argument("block-schur: A00 must be square with even size");
  std::vector<int> p(n_), T(n_);
  std::iota(p.begin(), p.end(), 0);
  std::iota(T.begin(), T.end(), n_);
  a_pT_ = a00.extract(p, T);
  a_Tp_ = a00.extract(T, p);
}

BlockSchurOperator::BlockSchurOperator(const CsrMatrix& a00, const CsrMatrix& schur, SubSolve sub,
                                       const AmgParams& amg)
    : n_(a00.rows() / 2) {
  if (schur.rows() != n_ || schur.cols() != n_)
    throw std::invalid_argument("block-schur: Schur approximation has the wrong size");
  std::vector<int> p(n_), T(n_);
  std::iota(p.begin(), p.end(), 0);
  std::iota(T.begin(), T.end(), n_);
  a_pT_ = a00.extract(p, T);
  a_Tp_ = a00.extract(T, p);
  try {
    app_inv_ = scalar_solver(a00.extract(p, p), sub, amg);
  } catch (const std::exception& e) {
    throw PreconditionerError(std::string("block-schur A_pp setup: ") + e.what());
  }
  try {
    schur_inv_ = scalar_solver(schur, sub, amg);
  } catch (const std::exception& e) {
    throw PreconditionerError(std::string("block-schur S_T setup: ") + e.what());
  }
}

void BlockSchurOperator::apply(std::span<const double> b, std::span<double> x) const {
  const auto bp = b.subspan(0, n_);
  const auto bT = b.subspan(n_, n_);
  auto xp = x.subspan(0, n_);
  auto xT = x.subspan(n_, n_);
  std::vector<double> tmp(n_), rhs(n_);
  // 1: A_pp x_p = b_p
  app_inv_->apply(bp, xp);
  // 2: b~_T = b_T - A_Tp x_p
  a_Tp_.multiply(xp, tmp);
  for (int i = 0; i < n_; ++i) rhs[i] = bT[i] - tmp[i];
  // 3: S~_T dT = b~_T
  schur_inv_->apply(rhs, xT);
  // 4: b~_p = b_p - A_pT dT
  a_pT_.multiply(xT, tmp);
  for (int i = 0; i < n_; ++i) rhs[i] = bp[i] - tmp[i];
  // 5: A_pp dp = b~_p
  app_inv_->apply(rhs, xp);
}

BlockDiagonalOperator::BlockDiagonalOperator(const CsrMatrix& a00, SubSolve sub,
                                             const AmgParams& amg)
    : n_(a00.rows() / 2) {
  std::vector<int> p(n_), T(n_);
  std::iota(p.begin(), p.end(), 0);
  std::iota(T.begin(), T.end(), n_);
  pp_inv_ = scalar_solver(a00.extract(p, p), sub, amg);
  TT_inv_ = scalar_solver(a00.extract(T, T), sub, amg);
}

void BlockDiagonalOperator::apply(std::span<const double> b, std::span<double> x) const {
  pp_inv_->apply(b.subspan(0, n_), x.subspan(0, n_));
  TT_inv_->apply(b.subspan(n_, n_), x.subspan(n_, n_));
}

RestrictedStage::RestrictedStage(std::vector<int> primary_rows, std::vector<int> secondary_rows,
                                 CsrMatrix decoupling, int full_size,
                                 std::shared_ptr<const LinearOperator> inner)
    : n_(full_size),
      prim_(std::move(primary_rows)),
      sec_(std::move(secondary_rows)),
      D_(std::move(decoupling)),
      inner_(std::move(inner)) {
  if (inner_->size() != static_cast<int>(prim_.size()))
    throw std::invalid_argument("restricted stage: inner solver size mismatch");
}

void RestrictedStage::apply(std::span<const double> b, std::span<double> x) const {
  const std::size_t m = prim_.size();
  std::vector<double> bp(m), xp(m);
  for (std::size_t k = 0; k < m; ++k) bp[k] = b[prim_[k]];
  if (D_.nnz() > 0) {
    std::vector<double> bs(sec_.size()), db(m);
    for (std::size_t k = 0; k < sec_.size(); ++k) bs[k] = b[sec_[k]];
    D_.multiply(bs, db);
    for (std::size_t k = 0; k < m; ++k) bp[k] -= db[k];
  }
  inner_->apply(bp, xp);
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t k = 0; k < m; ++k) x[prim_[k]] = xp[k];
}

TwoStagePreconditioner::TwoStagePreconditioner(const CsrMatrix& a,
                                               std::shared_ptr<const LinearOperator> m1,
                                               std::shared_ptr<const LinearOperator> m2,
                                               StageOrder order)
    : a_(&a), m1_(std::move(m1)), m2_(std::move(m2)), order_(order) {
  if (m1_->size() != a.rows() || m2_->size() != a.rows())
    throw std::invalid_argument("two-stage: stage sizes do not match the matrix");
}

void TwoStagePreconditioner::apply(std::span<const double> b, std::span<double> x) const {
  const bool restricted_first = order_ == StageOrder::restricted_first;
  const LinearOperator& first = restricted_first ? *m1_ : *m2_;
  const LinearOperator& second = restricted_first ? *m2_ : *m1_;
  const char* first_name = restricted_first ? "first stage" : "second stage (ILU)";
  const char* second_name = restricted_first ? "second stage (ILU)" : "first stage";
  const int n = a_->rows();
  std::vector<double> r(n), x2(n);
  try {
    first.apply(b, x);
  } catch (const std::exception& e) {
    throw PreconditionerError(std::string(first_name) + ": " + e.what());
  }
  a_->multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  try {
    second.apply(r, x2);
  } catch (const std::exception& e) {
    throw PreconditionerError(std::string(second_name) + ": " + e.what());
  }
  for (int i = 0; i < n; ++i) x[i] += x2[i];
  ++m1_count_;
  ++m2_count_;
}

std::unique_ptr<TwoStagePreconditioner> build_preconditioner(const TwoStageSpec& spec,
                                                             const BlockSystem& a,
                                                             const CsrMatrix* schur) {
  const auto& one = spec.stage_one;
  one.validate();
  const auto& layout = a.layout;
  const int n = layout.num_cells();
  std::shared_ptr<const LinearOperator> m1, m2;
  std::vector<int> fallbacks;
  try {
    RestrictedSystem rs = restricted_system(a, one.restriction, one.decouple);
    fallbacks = rs.decoupling.singular_cells;
    std::shared_ptr<const LinearOperator> inner;
    switch (one.solver) {
      case StageSolver::amg_vcycle:
        inner = std::make_shared<AmgHierarchy>(amg_setup(rs.matrix, spec.amg));
        break;
      case StageSolver::dense_lu:
        inner = std::make_shared<SparseDirectSolver>(rs.matrix);
        break;
      case StageSolver::block_schur:
        if (!schur) throw std::invalid_argument("block-schur needs a Schur approximation");
        inner = std::make_shared<BlockSchurOperator>(rs.matrix, *schur, one.sub_solve, spec.amg);
        break;
      case StageSolver::uamg: {
        std::vector<int> labels(2 * n, 0);
        std::fill(labels.begin() + n, labels.end(), 1);
        inner = std::make_shared<AmgHierarchy>(uamg_setup(rs.matrix, std::move(labels), spec.amg));
        break;
      }
      case StageSolver::block_diag:
        inner = std::make_shared<BlockDiagonalOperator>(rs.matrix, one.sub_solve, spec.amg);
        break;
    }
    m1 = std::make_shared<RestrictedStage>(rows_of(layout, primary_fields(one.restriction)),
                                           rows_of(layout, secondary_fields(one.restriction)),
                                           std::move(rs.decoupling.D), layout.size(), inner);
  } catch (const std::exception& e) {
    throw PreconditionerError("first stage (" + solver_name(one) + ") setup: " + e.what());
  }
  try {
    if (spec.exact_second_stage)
      m2 = std::make_shared<SparseDirectSolver>(a.matrix);
    else
      m2 = std::make_shared<BlockJacobiIlu>(a.matrix, layout.partition(), spec.ilu_level);
  } catch (const std::exception& e) {
    throw PreconditionerError(std::string("second stage (ILU) setup: ") + e.what());
  }
  auto pc = std::make_unique<TwoStagePreconditioner>(a.matrix, m1, m2, spec.order);
  pc->decoupling_fallbacks = std::move(fallbacks);
  return pc;
}

}  // namespace thermoflow
