#include "thermoflow/sparse/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace thermoflow {

void write_matrix_market(const std::string& path, const CsrMatrix& a) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("matrix market: cannot open " + path + " for writing");
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%d %d %d\n", a.rows(), a.cols(), a.nnz());
  for (int r = 0; r < a.rows(); ++r) {
    auto c = a.row_cols(r);
    auto v = a.row_vals(r);
    for (std::size_t k = 0; k < c.size(); ++k) std::fprintf(f, "%d %d %.17g\n", r + 1, c[k] + 1, v[k]);
  }
  std::fclose(f);
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("matrix market: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty file " + path);
  std::string lower = line;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower.rfind("%%matrixmarket", 0) != 0 || lower.find("coordinate") == std::string::npos)
    throw std::runtime_error("matrix market: unsupported header in " + path);
  if (lower.find("complex") != std::string::npos || lower.find("pattern") != std::string::npos)
    throw std::runtime_error("matrix market: only real/integer fields are supported");
  const bool symmetric = lower.find("symmetric") != std::string::npos;

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  int rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz)) throw std::runtime_error("matrix market: bad size line");
  }
  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * nnz : nnz);
  for (int k = 0; k < nnz; ++k) {
    int r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v))
      throw std::runtime_error("matrix market: expected " + std::to_string(nnz) + " entries, read " +
                               std::to_string(k));
    t.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) t.push_back({c - 1, r - 1, v});
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace thermoflow
