#include "thermoflow/sparse/gmres.hpp"

#include <cmath>

#include "thermoflow/sparse/kernels.hpp"

namespace thermoflow {

GmresResult gmres(const CsrMatrix& a, std::span<const double> b, const LinearOperator& precond,
                  const GmresOptions& opts) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n || precond.size() != n)
    throw std::invalid_argument("gmres: dimension mismatch");

  GmresResult res;
  res.x.assign(n, 0.0);
  const double bnorm = kernels::norm2(b);
  res.residual_history.push_back(bnorm);
  if (!std::isfinite(bnorm)) throw SolverError("gmres: right-hand side is not finite");
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  const double target = opts.rtol * bnorm;
  const int restart = opts.restart > 0 ? opts.restart : opts.max_iterations;

  std::vector<double> r(b.begin(), b.end());
  double beta = bnorm;
  std::vector<std::vector<double>> basis;
  std::vector<std::vector<double>> h;  // h[j] is column j, length j + 2
  std::vector<double> cs, sn, g;
  std::vector<double> z(n), w(n);

  while (res.iterations < opts.max_iterations) {
    basis.assign(1, r);
    kernels::scale(1.0 / beta, basis[0]);
    h.clear();
    cs.clear();
    sn.clear();
    g.assign(1, beta);
    int k = 0;
    for (; k < restart && res.iterations < opts.max_iterations; ++k) {
      precond.apply(basis[k], z);
      kernels::spmv(a, z, w);
      std::vector<double> col(k + 2, 0.0);
      for (int i = 0; i <= k; ++i) {
        col[i] = kernels::dot(w, basis[i]);
        kernels::axpy(-col[i], basis[i], w);
      }
      col[k + 1] = kernels::norm2(w);
      if (!std::isfinite(col[k + 1])) throw SolverError("gmres: NaN encountered in Arnoldi process");
      const double hnext = col[k + 1];
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * col[i] + sn[i] * col[i + 1];
        col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
        col[i] = t;
      }
      const double denom = std::hypot(col[k], col[k + 1]);
      double c = 1.0, s = 0.0;
      if (denom != 0.0) {
        c = col[k] / denom;
        s = col[k + 1] / denom;
      }
      cs.push_back(c);
      sn.push_back(s);
      col[k] = denom;
      col[k + 1] = 0.0;
      g.push_back(-s * g[k]);
      g[k] = c * g[k];
      h.push_back(std::move(col));
      ++res.iterations;
      const double est = std::abs(g[k + 1]);
      res.residual_history.push_back(est);
      if (hnext == 0.0 || est <= target) {
        ++k;
        break;
      }
      basis.emplace_back(w);
      kernels::scale(1.0 / hnext, basis.back());
    }

    // y = H^{-1} g on the k x k upper triangle, then x += M (V y).
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[j][i] * y[j];
      if (h[i][i] == 0.0) throw SolverError("gmres: singular Hessenberg matrix");
      y[i] = s / h[i][i];
    }
    std::vector<double> vy(n, 0.0);
    for (int j = 0; j < k; ++j) kernels::axpy(y[j], basis[j], vy);
    precond.apply(vy, z);
    kernels::axpy(1.0, z, res.x);

    kernels::residual(a, res.x, b, r);
    beta = kernels::norm2(r);
    if (!std::isfinite(beta)) throw SolverError("gmres: NaN in residual");
    res.relative_residual = beta / bnorm;
    if (beta <= target) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace thermoflow
