#include "thermoflow/sparse/direct.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "thermoflow/sparse/dense.hpp"

namespace thermoflow {

struct SparseDirectSolver::Impl {
  Eigen::SparseMatrix<double> mat;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

SparseDirectSolver::SparseDirectSolver(const CsrMatrix& a) : n_(a.rows()), impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sparse LU: matrix not square");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (int r = 0; r < a.rows(); ++r) {
    auto c = a.row_cols(r);
    auto v = a.row_vals(r);
    for (std::size_t k = 0; k < c.size(); ++k) t.emplace_back(r, c[k], v[k]);
  }
  impl_->mat.resize(n_, n_);
  impl_->mat.setFromTriplets(t.begin(), t.end());
  impl_->mat.makeCompressed();
  impl_->lu.analyzePattern(impl_->mat);
  impl_->lu.factorize(impl_->mat);
  if (impl_->lu.info() != Eigen::Success)
    throw SingularMatrixError("sparse LU: factorization failed (" + impl_->lu.lastErrorMessage() + ")");
}

SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

void SparseDirectSolver::apply(std::span<const double> x, std::span<double> y) const {
  Eigen::Map<const Eigen::VectorXd> rhs(x.data(), n_);
  Eigen::Map<Eigen::VectorXd> out(y.data(), n_);
  out = impl_->lu.solve(rhs);
}

}  // namespace thermoflow
