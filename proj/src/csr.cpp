#include "thermoflow/sparse/csr.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace thermoflow {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0) throw std::invalid_argument("csr: negative dimension");
  if (static_cast<int>(row_ptr_.size()) != rows_ + 1)
    throw std::invalid_argument("csr: row_ptr size mismatch");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<int>(col_idx_.size()))
    throw std::invalid_argument("csr: index/value size mismatch");
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= cols_)
        throw std::invalid_argument("csr: column index out of range in row " + std::to_string(r));
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
        throw std::invalid_argument("csr: columns not strictly increasing in row " +
                                    std::to_string(r));
    }
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> ptr(rows + 1, 0);
  std::vector<int> idx;
  std::vector<double> val;
  idx.reserve(triplets.size());
  val.reserve(triplets.size());
  int last_row = -1, last_col = -1;
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("csr: triplet out of range");
    if (t.row == last_row && t.col == last_col) {
      val.back() += t.value;
      continue;
    }
    idx.push_back(t.col);
    val.push_back(t.value);
    ++ptr[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (int r = 0; r < rows; ++r) ptr[r + 1] += ptr[r];
  return CsrMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<int> ptr(n + 1), idx(n);
  for (int i = 0; i < n; ++i) {
    ptr[i + 1] = i + 1;
    idx[i] = i;
  }
  return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_dense(int rows, int cols, std::span<const double> a, bool keep_zeros) {
  std::vector<int> ptr(rows + 1, 0), idx;
  std::vector<double> val;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = a[static_cast<std::size_t>(r) * cols + c];
      if (v != 0.0 || keep_zeros) {
        idx.push_back(c);
        val.push_back(v);
      }
    }
    ptr[r + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

int CsrMatrix::find(int r, int c) const {
  const auto first = col_idx_.begin() + row_ptr_[r];
  const auto last = col_idx_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return -1;
  return static_cast<int>(it - col_idx_.begin());
}

double CsrMatrix::coeff(int r, int c) const {
  const int k = find(r, c);
  return k < 0 ? 0.0 : values_[k];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = coeff(r, r);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<int> ptr(cols_ + 1, 0);
  for (int c : col_idx_) ++ptr[c + 1];
  for (int c = 0; c < cols_; ++c) ptr[c + 1] += ptr[c];
  std::vector<int> idx(col_idx_.size());
  std::vector<double> val(values_.size());
  std::vector<int> next(ptr.begin(), ptr.end() - 1);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int dst = next[col_idx_[k]]++;
      idx[dst] = r;
      val[dst] = values_[k];
    }
  return CsrMatrix(cols_, rows_, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix CsrMatrix::extract(std::span<const int> row_map, std::span<const int> col_map) const {
  std::vector<int> inverse(cols_, -1);
  for (std::size_t k = 0; k < col_map.size(); ++k) inverse[col_map[k]] = static_cast<int>(k);
  std::vector<int> ptr(row_map.size() + 1, 0), idx;
  std::vector<double> val;
  std::vector<std::pair<int, double>> row;
  for (std::size_t i = 0; i < row_map.size(); ++i) {
    const int r = row_map[i];
    row.clear();
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int c = inverse[col_idx_[k]];
      if (c >= 0) row.emplace_back(c, values_[k]);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      idx.push_back(c);
      val.push_back(v);
    }
    ptr[i + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(static_cast<int>(row_map.size()), static_cast<int>(col_map.size()),
                   std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix CsrMatrix::diagonal_block(int begin, int end) const {
  std::vector<int> ptr(end - begin + 1, 0), idx;
  std::vector<double> val;
  for (int r = begin; r < end; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int c = col_idx_[k];
      if (c >= begin && c < end) {
        idx.push_back(c - begin);
        val.push_back(values_[k]);
      }
    }
    ptr[r - begin + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(end - begin, end - begin, std::move(ptr), std::move(idx), std::move(val));
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> a(static_cast<std::size_t>(rows_) * cols_, 0.0);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      a[static_cast<std::size_t>(r) * cols_ + col_idx_[k]] += values_[k];
  return a;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw std::invalid_argument("csr multiply: dimension mismatch");
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("spgemm: dimension mismatch");
  const int n = a.rows(), m = b.cols();
  std::vector<int> ptr(n + 1, 0), idx;
  std::vector<double> val;
  std::vector<int> marker(m, -1);
  std::vector<double> acc(m, 0.0);
  std::vector<int> cols;
  const auto ap = a.row_ptr();
  const auto ai = a.col_idx();
  const auto av = a.values();
  const auto bp = b.row_ptr();
  const auto bi = b.col_idx();
  const auto bv = b.values();
  for (int r = 0; r < n; ++r) {
    cols.clear();
    for (int ka = ap[r]; ka < ap[r + 1]; ++ka) {
      const int j = ai[ka];
      const double va = av[ka];
      for (int kb = bp[j]; kb < bp[j + 1]; ++kb) {
        const int c = bi[kb];
        if (marker[c] != r) {
          marker[c] = r;
          acc[c] = 0.0;
          cols.push_back(c);
        }
        acc[c] += va * bv[kb];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int c : cols) {
      idx.push_back(c);
      val.push_back(acc[c]);
    }
    ptr[r + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(n, m, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("csr add: dimension mismatch");
  std::vector<int> ptr(a.rows() + 1, 0), idx;
  std::vector<double> val;
  for (int r = 0; r < a.rows(); ++r) {
    auto ac = a.row_cols(r);
    auto av = a.row_vals(r);
    auto bc = b.row_cols(r);
    auto bv = b.row_vals(r);
    std::size_t i = 0, j = 0;
    while (i < ac.size() || j < bc.size()) {
      if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
        idx.push_back(ac[i]);
        val.push_back(alpha * av[i++]);
      } else if (i == ac.size() || bc[j] < ac[i]) {
        idx.push_back(bc[j]);
        val.push_back(beta * bv[j++]);
      } else {
        idx.push_back(ac[i]);
        val.push_back(alpha * av[i++] + beta * bv[j++]);
      }
    }
    ptr[r + 1] = static_cast<int>(idx.size());
  }
  return CsrMatrix(a.rows(), a.cols(), std::move(ptr), std::move(idx), std::move(val));
}

}  // namespace thermoflow
