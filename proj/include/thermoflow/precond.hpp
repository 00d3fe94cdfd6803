#ifndef THERMOFLOW_PRECOND_HPP
#define THERMOFLOW_PRECOND_HPP

#include <atomic>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermoflow/amg.hpp"
#include "thermoflow/discretization.hpp"
#include "thermoflow/sparse/csr.hpp"
#include "thermoflow/sparse/operator.hpp"

namespace thermoflow {

class PreconditionerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Restriction { pressure, pressure_temperature };
/// dense_lu is an exact solve of the restricted system (sparse direct LU).
enum class StageSolver { amg_vcycle, dense_lu, block_schur, uamg, block_diag };
/// Sub-solves of block_schur and block_diag.
enum class SubSolve { amg, lu };
enum class Decoupling { none, quasi_impes, true_impes };
enum class StageOrder { restricted_first, ilu_first };

struct StageOneSpec {
  Restriction restriction = Restriction::pressure;
  StageSolver solver = StageSolver::amg_vcycle;
  SubSolve sub_solve = SubSolve::amg;
  Decoupling decouple = Decoupling::none;

  void validate() const;
};

struct TwoStageSpec {
  StageOneSpec stage_one;
  int ilu_level = 0;
  /// Replace ILU by an exact solve of the full system (testing only).
  bool exact_second_stage = false;
  StageOrder order = StageOrder::restricted_first;
  AmgParams amg;

  void validate(bool scaling_enabled) const;
};

/// Named variants: cpr-amg, cpr-lu, cpr-amg-ilu1, cptr-block-amg,
/// cptr-block-lu, cptr-uamg, cptr-uamg-ti, cptr-bd-lu, cptr-bd-amg.
TwoStageSpec parse_variant(const std::string& name);
const std::vector<std::string>& variant_names();
Decoupling parse_decoupling(const std::string& s);
StageOrder parse_order(const std::string& s);
std::string to_string(Decoupling d);
std::string to_string(StageOrder o);

/// Block-diagonal decoupling matrix D (primary rows x secondary rows, both in
/// restricted order) with one dense block per cell.
struct DecouplingOperator {
  CsrMatrix D;
  std::vector<int> singular_cells;  // cells whose block could not be inverted (D = 0 there)
};

/// D = diag(A_ps) diag(A_ss)^{-1} (QI) or colsum(A_ps) colsum(A_ss)^{-1} (TI),
/// over cell blocks. Primary fields are p (CPR) or p, T (CPTR).
DecouplingOperator decoupling_operator(const BlockSystem& a, Restriction r, Decoupling kind);

/// First-stage matrix A_prim,prim - D A_sec,prim and its decoupling operator.
struct RestrictedSystem {
  CsrMatrix matrix;
  DecouplingOperator decoupling;
  bool decoupled = false;
};
RestrictedSystem restricted_system(const BlockSystem& a, Restriction r, Decoupling kind);

/// Five-step block preconditioner for A00 = [A_pp A_pT; A_Tp A_TT] with the
/// temperature Schur complement replaced by S (cell order, p rows first).
class BlockSchurOperator final : public LinearOperator {
 public:
  BlockSchurOperator(const CsrMatrix& a00, const CsrMatrix& schur, SubSolve sub,
                     const AmgParams& amg = {});
  /// Sub-solves given directly (used with exact solvers in tests).
  BlockSchurOperator(const CsrMatrix& a00, std::shared_ptr<const LinearOperator> app_inv,
                     std::shared_ptr<const LinearOperator> schur_inv);
  int size() const override { return 2 * n_; }
  void apply(std::span<const double> b, std::span<double> x) const override;

 private:
  int n_;
  CsrMatrix a_pT_, a_Tp_;
  std::shared_ptr<const LinearOperator> app_inv_, schur_inv_;
};

/// diag(A_pp, A_TT)^{-1} applied blockwise, ignoring the coupling blocks.
class BlockDiagonalOperator final : public LinearOperator {
 public:
  BlockDiagonalOperator(const CsrMatrix& a00, SubSolve sub, const AmgParams& amg = {});
  int size() const override { return 2 * n_; }
  void apply(std::span<const double> b, std::span<double> x) const override;

 private:
  int n_;
  std::shared_ptr<const LinearOperator> pp_inv_, TT_inv_;
};

/// M1^{-1} b = R^T M (R b - D b_sec): restriction to the primary rows, an
/// inner solve, prolongation by zero.
class RestrictedStage final : public LinearOperator {
 public:
  RestrictedStage(std::vector<int> primary_rows, std::vector<int> secondary_rows,
                  CsrMatrix decoupling, int full_size, std::shared_ptr<const LinearOperator> inner);
  int size() const override { return n_; }
  void apply(std::span<const double> b, std::span<double> x) const override;
  const LinearOperator& inner() const { return *inner_; }

 private:
  int n_;
  std::vector<int> prim_, sec_;
  CsrMatrix D_;
  std::shared_ptr<const LinearOperator> inner_;
};

/// Multiplicative two-stage preconditioner:
/// x1 = M1^{-1} b, x = x1 + M2^{-1}(b - A x1), stages swapped for ilu-first.
class TwoStagePreconditioner final : public LinearOperator {
 public:
  TwoStagePreconditioner(const CsrMatrix& a, std::shared_ptr<const LinearOperator> m1,
                         std::shared_ptr<const LinearOperator> m2,
                         StageOrder order = StageOrder::restricted_first);
  int size() const override { return a_->rows(); }
  void apply(std::span<const double> b, std::span<double> x) const override;

  long first_stage_applications() const { return m1_count_.load(); }
  long second_stage_applications() const { return m2_count_.load(); }
  const LinearOperator& first_stage() const { return *m1_; }
  const LinearOperator& second_stage() const { return *m2_; }
  /// Cells where decoupling fell back to D = 0.
  std::vector<int> decoupling_fallbacks;

 private:
  const CsrMatrix* a_;
  std::shared_ptr<const LinearOperator> m1_, m2_;
  StageOrder order_;
  mutable std::atomic<long> m1_count_{0}, m2_count_{0};
};

/// Builds the preconditioner of a variant for one Newton system. `schur` is
/// the S_T approximation (required by block_schur; cell order).
std::unique_ptr<TwoStagePreconditioner> build_preconditioner(const TwoStageSpec& spec,
                                                             const BlockSystem& a,
                                                             const CsrMatrix* schur);

}  // namespace thermoflow

#endif
