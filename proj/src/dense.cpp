#include "thermoflow/sparse/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace thermoflow {

void IdentityOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::copy(x.begin(), x.end(), y.begin());
}

void ZeroOperator::apply(std::span<const double>, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
}

void MatrixOperator::apply(std::span<const double> x, std::span<double> y) const {
  a_->multiply(x, y);
}

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& a) {
  DenseMatrix d(a.rows(), a.cols());
  d.data = a.to_dense();
  return d;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("dense product: dimension mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseLu::DenseLu(DenseMatrix a) : n_(a.rows), lu_(std::move(a.data)), perm_(a.rows) {
  if (a.rows != a.cols) throw std::invalid_argument("dense LU: matrix not square");
  const int n = n_;
  double scale = 0.0;
  for (double v : lu_) scale = std::max(scale, std::abs(v));
  const double tiny = scale * n * std::numeric_limits<double>::epsilon();
  for (int i = 0; i < n; ++i) perm_[i] = i;
  auto at = [&](int r, int c) -> double& { return lu_[static_cast<std::size_t>(r) * n + c]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(at(k, k));
    for (int r = k + 1; r < n; ++r)
      if (std::abs(at(r, k)) > best) {
        best = std::abs(at(r, k));
        piv = r;
      }
    if (!(best > tiny) || scale == 0.0)
      throw SingularMatrixError("dense LU: matrix is singular to working precision at column " +
                                std::to_string(k));
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(at(k, c), at(piv, c));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / at(k, k);
    for (int r = k + 1; r < n; ++r) {
      const double l = at(r, k) * inv;
      at(r, k) = l;
      if (l == 0.0) continue;
      double* row_r = &at(r, 0);
      const double* row_k = &at(k, 0);
      for (int c = k + 1; c < n; ++c) row_r[c] -= l * row_k[c];
    }
  }
}

void DenseLu::apply(std::span<const double> b, std::span<double> x) const {
  const int n = n_;
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw std::invalid_argument("dense LU solve: dimension mismatch");
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (int i = 0; i < n; ++i) {
    const double* row = &lu_[static_cast<std::size_t>(i) * n];
    double s = y[i];
    for (int j = 0; j < i; ++j) s -= row[j] * y[j];
    y[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    const double* row = &lu_[static_cast<std::size_t>(i) * n];
    double s = y[i];
    for (int j = i + 1; j < n; ++j) s -= row[j] * y[j];
    y[i] = s / row[i];
  }
  std::copy(y.begin(), y.end(), x.begin());
}

std::vector<double> DenseLu::solve(std::span<const double> b) const {
  std::vector<double> x(n_);
  apply(b, x);
  return x;
}

DenseMatrix DenseLu::solve(const DenseMatrix& b) const {
  if (b.rows != n_) throw std::invalid_argument("dense LU solve: dimension mismatch");
  DenseMatrix x(b.rows, b.cols);
  std::vector<double> col(n_), out(n_);
  for (int c = 0; c < b.cols; ++c) {
    for (int r = 0; r < n_; ++r) col[r] = b(r, c);
    apply(col, out);
    for (int r = 0; r < n_; ++r) x(r, c) = out[r];
  }
  return x;
}

std::vector<double> dense_lu_solve(const DenseMatrix& a, std::span<const double> b) {
  return DenseLu(a).solve(b);
}

}  // namespace thermoflow
