#ifndef THERMOFLOW_SPARSE_KERNELS_HPP
#define THERMOFLOW_SPARSE_KERNELS_HPP

#include <span>

#include "thermoflow/sparse/csr.hpp"

namespace thermoflow::kernels {

// Reductions are accumulated per fixed-size chunk and the chunk partials are
// summed in chunk order, so the result does not depend on the thread count.
inline constexpr std::size_t kReductionChunk = 4096;

namespace serial {
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
/// r = b - A x
void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r);
}  // namespace serial

namespace omp {
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r);
}  // namespace omp

using omp::axpy;
using omp::dot;
using omp::norm2;
using omp::residual;
using omp::scale;
using omp::spmv;

}  // namespace thermoflow::kernels

#endif
