#ifndef THERMOFLOW_SPARSE_OPERATOR_HPP
#define THERMOFLOW_SPARSE_OPERATOR_HPP

#include <span>

#include "thermoflow/sparse/csr.hpp"

namespace thermoflow {

/// A fixed linear map y = M x. Preconditioners implement this with M
/// approximating an inverse.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(int n) : n_(n) {}
  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  int n_;
};

class ZeroOperator final : public LinearOperator {
 public:
  explicit ZeroOperator(int n) : n_(n) {}
  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  int n_;
};

/// Wraps a matrix as an operator (y = A x).
class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(const CsrMatrix& a) : a_(&a) {}
  int size() const override { return a_->rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  const CsrMatrix* a_;
};

}  // namespace thermoflow

#endif
