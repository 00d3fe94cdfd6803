#ifndef THERMOFLOW_BENCH_ORACLE_HPP
#define THERMOFLOW_BENCH_ORACLE_HPP

#include "thermoflow/discretization.hpp"
#include "thermoflow/sparse/dense.hpp"

namespace thermoflow::bench {

inline constexpr int kOracleMaxCells = 2500;

/// 2-norm condition numbers of the preconditioned temperature Schur
/// complement for three approximations, plus those of S_T and A_TT.
/// Singular approximations give +infinity.
struct SchurConditionNumbers {
  double diag = 0.0;  // S~_diag = A_TT - A_Tp diag(A_pp)^{-1} A_pT
  double att = 0.0;   // S~ = A_TT
  double st = 0.0;    // S~_T, the assembled approximation
  double S = 0.0;     // exact Schur complement
  double A_TT = 0.0;
};

/// Exact dense S_T = A_TT - A_Tp A_pp^{-1} A_pT of a p-T block system given
/// with p rows/columns first.
DenseMatrix exact_temperature_schur(const CsrMatrix& a00);

/// sigma_max / sigma_min, +infinity when sigma_min is zero.
double condition_number(const DenseMatrix& a);

/// Linearizes at (state, prev) and compares the approximations densely.
/// Throws std::invalid_argument above kOracleMaxCells cells.
SchurConditionNumbers schur_condition_oracle(const ReservoirModel& model, const State& state,
                                             const State& prev);

}  // namespace thermoflow::bench

#endif
