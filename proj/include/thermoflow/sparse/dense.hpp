#ifndef THERMOFLOW_SPARSE_DENSE_HPP
#define THERMOFLOW_SPARSE_DENSE_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "thermoflow/sparse/operator.hpp"

namespace thermoflow {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major dense matrix.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  static DenseMatrix from_csr(const CsrMatrix& a);

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// LU factorization with partial pivoting, PA = LU.
class DenseLu final : public LinearOperator {
 public:
  explicit DenseLu(DenseMatrix a);
  explicit DenseLu(const CsrMatrix& a) : DenseLu(DenseMatrix::from_csr(a)) {}

  int size() const override { return n_; }
  void apply(std::span<const double> b, std::span<double> x) const override;
  std::vector<double> solve(std::span<const double> b) const;
  /// X = A^{-1} B, column by column.
  DenseMatrix solve(const DenseMatrix& b) const;

 private:
  int n_;
  std::vector<double> lu_;
  std::vector<int> perm_;
};

/// x solving A x = b. Throws SingularMatrixError when a pivot vanishes to
/// machine precision relative to the matrix scale.
std::vector<double> dense_lu_solve(const DenseMatrix& a, std::span<const double> b);

}  // namespace thermoflow

#endif
