#ifndef THERMOFLOW_SPARSE_GMRES_HPP
#define THERMOFLOW_SPARSE_GMRES_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "thermoflow/sparse/csr.hpp"
#include "thermoflow/sparse/operator.hpp"

namespace thermoflow {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GmresOptions {
  double rtol = 1e-8;
  int max_iterations = 200;
  /// Krylov dimension before restart; 0 means unrestarted (= max_iterations).
  int restart = 0;
};

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  bool converged = false;
  /// Residual norm estimates, starting with ||b||; nonincreasing within a cycle.
  std::vector<double> residual_history;
  double relative_residual = 0.0;
};

/// Right-preconditioned GMRES from a zero initial guess. Converged means
/// ||b - A x|| <= rtol ||b|| for the returned x. Throws SolverError when a
/// NaN appears.
GmresResult gmres(const CsrMatrix& a, std::span<const double> b, const LinearOperator& precond,
                  const GmresOptions& opts = {});

}  // namespace thermoflow

#endif
