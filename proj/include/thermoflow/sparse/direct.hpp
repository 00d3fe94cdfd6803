#ifndef THERMOFLOW_SPARSE_DIRECT_HPP
#define THERMOFLOW_SPARSE_DIRECT_HPP

#include <memory>

#include "thermoflow/sparse/operator.hpp"

namespace thermoflow {

/// Sparse direct LU solve, y = A^{-1} x. Used where a subsystem is solved
/// exactly (the "-lu" variants and AMG coarse levels that stop shrinking).
class SparseDirectSolver final : public LinearOperator {
 public:
  explicit SparseDirectSolver(const CsrMatrix& a);
  ~SparseDirectSolver() override;
  SparseDirectSolver(SparseDirectSolver&&) noexcept;
  SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace thermoflow

#endif
