#ifndef THERMOFLOW_AMG_HPP
#define THERMOFLOW_AMG_HPP

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "thermoflow/sparse/csr.hpp"
#include "thermoflow/sparse/operator.hpp"

namespace thermoflow {

class AmgSetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AmgParams {
  double theta = 0.25;   // strength threshold, 0 < theta < 1
  int max_levels = 25;
  int coarse_size = 50;  // at or below this many rows (per unknown) the level is solved directly
  /// Coarsening is abandoned when a level keeps more than this fraction of rows.
  double max_coarse_fraction = 0.9;

  void validate() const;
};

struct AmgLevel {
  CsrMatrix A;
  CsrMatrix P;  // prolongation to this level from the next coarser one (empty on the last)
  CsrMatrix R;  // = P^T
  std::vector<int> labels;  // unknown id per row (all zero for scalar AMG)
};

/// Ruge–Stüben hierarchy. As an operator it applies one V(1,1) cycle from a
/// zero initial guess: forward Gauss–Seidel down, backward Gauss–Seidel up,
/// direct solve on the last level.
class AmgHierarchy final : public LinearOperator {
 public:
  int size() const override { return levels_.empty() ? 0 : levels_.front().A.rows(); }
  void apply(std::span<const double> b, std::span<double> x) const override;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const AmgLevel& level(int l) const { return levels_[l]; }
  std::vector<int> level_sizes() const;

 private:
  friend AmgHierarchy build_hierarchy(const CsrMatrix&, std::vector<int>, const AmgParams&);
  void cycle(int l, std::span<const double> b, std::span<double> x) const;

  std::vector<AmgLevel> levels_;
  std::shared_ptr<const LinearOperator> coarse_;
};

/// Strong dependencies of every row: j with -s a_ij >= theta max_k(-s a_ik),
/// s = sign(a_ii). Rows whose off-diagonals are mostly of the same sign as
/// the diagonal use |a_ij| >= theta max_k |a_ik| instead. With labels, only
/// same-label entries are considered.
std::vector<std::vector<int>> strength_graph(const CsrMatrix& a, double theta,
                                             std::span<const int> labels = {});

/// Two-pass Ruge–Stüben C/F splitting. Returns true for C points.
std::vector<char> rs_coarsen(const std::vector<std::vector<int>>& strong);

/// Classical interpolation from a C/F splitting (columns numbered by C point order).
CsrMatrix classical_interpolation(const CsrMatrix& a, const std::vector<std::vector<int>>& strong,
                                  const std::vector<char>& is_coarse, std::span<const int> labels = {});

AmgHierarchy amg_setup(const CsrMatrix& a, const AmgParams& params = {});

/// Unknown-based AMG: strength and interpolation use only entries coupling
/// rows of equal label, the coarse operators are Galerkin products of the full
/// coupled matrix.
AmgHierarchy uamg_setup(const CsrMatrix& a, std::vector<int> labels, const AmgParams& params = {});

std::vector<double> amg_vcycle(const AmgHierarchy& h, std::span<const double> b);

}  // namespace thermoflow

#endif
