#ifndef THERMOFLOW_SPARSE_ILU_HPP
#define THERMOFLOW_SPARSE_ILU_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "thermoflow/sparse/csr.hpp"
#include "thermoflow/sparse/operator.hpp"

namespace thermoflow {

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combined ILU(k) factors: strictly lower part is L (unit diagonal implied),
/// diagonal and upper part are U.
struct IluFactors {
  CsrMatrix lu;
  std::vector<int> diag_pos;
  int fill_level = 0;
};

/// Symbolic level-of-fill pattern followed by numeric factorization, no
/// pivoting. Throws FactorizationError on a missing or zero pivot.
IluFactors ilu_factor(const CsrMatrix& a, int fill_level);

/// z = (LU)^{-1} r
void ilu_apply(const IluFactors& f, std::span<const double> r, std::span<double> z);

class IluPreconditioner final : public LinearOperator {
 public:
  IluPreconditioner(const CsrMatrix& a, int fill_level) : f_(ilu_factor(a, fill_level)) {}
  int size() const override { return f_.lu.rows(); }
  void apply(std::span<const double> r, std::span<double> z) const override { ilu_apply(f_, r, z); }
  const IluFactors& factors() const { return f_; }

 private:
  IluFactors f_;
};

/// Contiguous row ranges, one per subdomain.
struct RowPartition {
  std::vector<int> offsets;  // size P + 1, offsets[0] = 0
  int count() const { return static_cast<int>(offsets.size()) - 1; }
  static RowPartition single(int n) { return {{0, n}}; }
  /// Subdomain id per row.
  std::vector<int> ids() const;
};

/// ILU(k) on each diagonal subdomain block; couplings between subdomains are
/// dropped.
class BlockJacobiIlu final : public LinearOperator {
 public:
  BlockJacobiIlu(const CsrMatrix& a, RowPartition partition, int fill_level);
  int size() const override { return n_; }
  void apply(std::span<const double> r, std::span<double> z) const override;
  const std::vector<IluFactors>& blocks() const { return blocks_; }
  const RowPartition& partition() const { return partition_; }

 private:
  int n_;
  RowPartition partition_;
  std::vector<IluFactors> blocks_;
};

}  // namespace thermoflow

#endif
