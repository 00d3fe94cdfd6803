#ifndef THERMOFLOW_SPARSE_CSR_HPP
#define THERMOFLOW_SPARSE_CSR_HPP

#include <span>
#include <vector>

namespace thermoflow {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; explicit zeros are allowed.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
            std::vector<double> values);

  /// Duplicate entries are summed.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(int n);
  static CsrMatrix from_dense(int rows, int cols, std::span<const double> row_major,
                              bool keep_zeros = false);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(col_idx_.size()); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::span<const int> row_cols(int r) const {
    return {col_idx_.data() + row_ptr_[r], col_idx_.data() + row_ptr_[r + 1]};
  }
  std::span<const double> row_vals(int r) const {
    return {values_.data() + row_ptr_[r], values_.data() + row_ptr_[r + 1]};
  }

  /// Position of (r, c) in the value array, or -1 when structurally zero.
  int find(int r, int c) const;
  double coeff(int r, int c) const;

  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;

  /// Rows and columns picked by index maps; entries whose column is not in
  /// `col_map` are dropped. `col_map[k]` becomes column k of the result.
  CsrMatrix extract(std::span<const int> row_map, std::span<const int> col_map) const;

  /// Contiguous diagonal block [begin, end) x [begin, end).
  CsrMatrix diagonal_block(int begin, int end) const;

  std::vector<double> to_dense() const;

  /// y = A x, serial reference order.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// C = A B.
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// C = alpha A + beta B (patterns are merged).
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);

}  // namespace thermoflow

#endif
