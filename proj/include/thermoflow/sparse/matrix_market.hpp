#ifndef THERMOFLOW_SPARSE_MATRIX_MARKET_HPP
#define THERMOFLOW_SPARSE_MATRIX_MARKET_HPP

#include <string>

#include "thermoflow/sparse/csr.hpp"

namespace thermoflow {

/// Writes `%%MatrixMarket matrix coordinate real general` with 1-based
/// indices and values in %.17g.
void write_matrix_market(const std::string& path, const CsrMatrix& a);

/// Reads a coordinate real/integer matrix, `general` or `symmetric`.
CsrMatrix read_matrix_market(const std::string& path);

}  // namespace thermoflow

#endif
