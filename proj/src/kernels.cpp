#include "thermoflow/sparse/kernels.hpp"

#include <algorithm>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace thermoflow::kernels {

namespace {

void check_spmv(const CsrMatrix& a, std::size_t nx, std::size_t ny) {
  if (static_cast<int>(nx) != a.cols() || static_cast<int>(ny) != a.rows())
    throw std::invalid_argument("spmv: dimension mismatch");
}

void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("vector kernel: length mismatch");
}

}  // namespace

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_spmv(a, x.size(), y.size());
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (int r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (int k = ptr[r]; k < ptr[r + 1]; ++k) s += val[k] * x[idx[k]];
    y[r] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same(x.size(), y.size());
  double total = 0.0;
  for (std::size_t c0 = 0; c0 < x.size(); c0 += kReductionChunk) {
    const std::size_t c1 = std::min(x.size(), c0 + kReductionChunk);
    double s = 0.0;
    for (std::size_t i = c0; i < c1; ++i) s += x[i] * y[i];
    total += s;
  }
  return total;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r) {
  check_spmv(a, x.size(), r.size());
  check_same(b.size(), r.size());
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    r[i] = b[i] - s;
  }
}

}  // namespace serial

namespace omp {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_spmv(a, x.size(), y.size());
  const int* ptr = a.row_ptr().data();
  const int* idx = a.col_idx().data();
  const double* val = a.values().data();
  const int n = a.rows();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = ptr[r]; k < ptr[r + 1]; ++k) s += val[k] * x[idx[k]];
    y[r] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same(x.size(), y.size());
  const std::size_t n = x.size();
  const long chunks = static_cast<long>((n + kReductionChunk - 1) / kReductionChunk);
  if (chunks <= 1) return serial::dot(x, y);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    const std::size_t c0 = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t c1 = std::min(n, c0 + kReductionChunk);
    double s = 0.0;
    for (std::size_t i = c0; i < c1; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size());
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) x[i] *= alpha;
}

void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r) {
  check_spmv(a, x.size(), r.size());
  check_same(b.size(), r.size());
  const int* ptr = a.row_ptr().data();
  const int* idx = a.col_idx().data();
  const double* val = a.values().data();
  const int n = a.rows();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    r[i] = b[i] - s;
  }
}

}  // namespace omp

}  // namespace thermoflow::kernels
