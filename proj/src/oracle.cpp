#include "thermoflow/bench/oracle.hpp"

#include <Eigen/Dense>
#include <limits>
#include <numeric>

namespace thermoflow::bench {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) m(i, j) = a(i, j);
  return m;
}

/// cond(S~^{-1} S), infinite when S~ is singular.
double preconditioned_condition(const DenseMatrix& approx, const DenseMatrix& S) {
  try {
    const DenseLu lu(approx);
    return condition_number(lu.solve(S));
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

double condition_number(const DenseMatrix& a) {
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

DenseMatrix exact_temperature_schur(const CsrMatrix& a00) {
  const int n = a00.rows() / 2;
  std::vector<int> p(n), T(n);
  std::iota(p.begin(), p.end(), 0);
  std::iota(T.begin(), T.end(), n);
  const DenseMatrix app = DenseMatrix::from_csr(a00.extract(p, p));
  const DenseMatrix apT = DenseMatrix::from_csr(a00.extract(p, T));
  const DenseMatrix aTp = DenseMatrix::from_csr(a00.extract(T, p));
  DenseMatrix S = DenseMatrix::from_csr(a00.extract(T, T));
  const DenseMatrix corr = aTp * DenseLu(app).solve(apT);
  for (std::size_t k = 0; k < S.data.size(); ++k) S.data[k] -= corr.data[k];
  return S;
}

SchurConditionNumbers schur_condition_oracle(const ReservoirModel& model, const State& state,
                                             const State& prev) {
  const int n = model.num_cells();
  if (n > kOracleMaxCells)
    throw std::invalid_argument("schur oracle: " + std::to_string(n) + " cells exceed the dense limit of " +
                                std::to_string(kOracleMaxCells));
  const DofLayout layout(n, Ordering::field_wise);
  const BlockSystem sys = assemble_jacobian(model, state, prev, layout);
  const CsrMatrix a00 = sys.block({Field::p, Field::T}, {Field::p, Field::T});
  const DenseMatrix S = exact_temperature_schur(a00);

  const CsrMatrix att = sys.block(Field::T, Field::T);
  const CsrMatrix app = sys.block(Field::p, Field::p);
  const CsrMatrix apT = sys.block(Field::p, Field::T);
  const CsrMatrix aTp = sys.block(Field::T, Field::p);

  // S~_diag = A_TT - A_Tp diag(A_pp)^{-1} A_pT
  std::vector<Triplet> inv;
  const auto d = app.diagonal();
  for (int i = 0; i < n; ++i) inv.push_back({i, i, 1.0 / d[i]});
  const CsrMatrix dinv = CsrMatrix::from_triplets(n, n, std::move(inv));
  const CsrMatrix s_diag = add(att, multiply(aTp, multiply(dinv, apT)), 1.0, -1.0);

  SchurConditionNumbers out;
  out.diag = preconditioned_condition(DenseMatrix::from_csr(s_diag), S);
  out.att = preconditioned_condition(DenseMatrix::from_csr(att), S);
  out.st = preconditioned_condition(DenseMatrix::from_csr(assemble_schur_approx(model, state)), S);
  out.S = condition_number(S);
  out.A_TT = condition_number(DenseMatrix::from_csr(att));
  return out;
}

}  // namespace thermoflow::bench
