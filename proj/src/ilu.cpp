#include "thermoflow/sparse/ilu.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>

namespace thermoflow {

namespace {

struct Pattern {
  std::vector<int> ptr{0};
  std::vector<int> idx;
  std::vector<int> diag;
};

Pattern symbolic(const CsrMatrix& a, int fill) {
  const int n = a.rows();
  Pattern pat;
  pat.diag.resize(n);
  std::vector<int> levels;  // level of every stored entry
  std::vector<int> lev(n, INT_MAX);
  std::vector<int> next(n + 1, -1);
  constexpr int kEnd = INT_MAX;
  for (int i = 0; i < n; ++i) {
    auto cols = a.row_cols(i);
    if (!std::binary_search(cols.begin(), cols.end(), i))
      throw FactorizationError("ilu: structurally zero diagonal in row " + std::to_string(i));
    // sorted singly linked list through next[], head stored at next[n]
    int head = kEnd;
    int tail = -1;
    for (int c : cols) {
      lev[c] = 0;
      if (tail < 0) head = c; else next[tail] = c;
      tail = c;
    }
    next[tail] = kEnd;
    if (fill > 0) {
      for (int k = head; k != kEnd && k < i; k = next[k]) {
        const int lik = lev[k];
        int prev = k;
        for (int p = pat.diag[k] + 1; p < pat.ptr[k + 1]; ++p) {
          const int j = pat.idx[p];
          const int l = lik + levels[p] + 1;
          if (l > fill) continue;
          // advance prev to the last list node < j
          while (next[prev] != kEnd && next[prev] < j) prev = next[prev];
          if (next[prev] == j) {
            lev[j] = std::min(lev[j], l);
          } else {
            next[j] = next[prev];
            next[prev] = j;
            lev[j] = l;
          }
          prev = j;
        }
      }
    }
    for (int c = head; c != kEnd; c = next[c]) {
      if (c == i) pat.diag[i] = static_cast<int>(pat.idx.size());
      pat.idx.push_back(c);
      levels.push_back(lev[c]);
      lev[c] = INT_MAX;
    }
    pat.ptr.push_back(static_cast<int>(pat.idx.size()));
  }
  return pat;
}

}  // namespace

IluFactors ilu_factor(const CsrMatrix& a, int fill_level) {
  if (a.rows() != a.cols()) throw std::invalid_argument("ilu: matrix not square");
  if (fill_level < 0) throw std::invalid_argument("ilu: negative fill level");
  const int n = a.rows();
  Pattern pat = symbolic(a, fill_level);
  std::vector<double> val(pat.idx.size(), 0.0);
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    const int b = pat.ptr[i], e = pat.ptr[i + 1];
    for (int p = b; p < e; ++p) pos[pat.idx[p]] = p;
    auto cols = a.row_cols(i);
    auto vals = a.row_vals(i);
    for (std::size_t q = 0; q < cols.size(); ++q) val[pos[cols[q]]] = vals[q];
    for (int p = b; p < pat.diag[i]; ++p) {
      const int k = pat.idx[p];
      const double ukk = val[pat.diag[k]];
      const double lik = val[p] / ukk;
      val[p] = lik;
      if (lik == 0.0) continue;
      for (int q = pat.diag[k] + 1; q < pat.ptr[k + 1]; ++q) {
        const int j = pat.idx[q];
        if (pos[j] >= 0) val[pos[j]] -= lik * val[q];
      }
    }
    const double d = val[pat.diag[i]];
    if (d == 0.0 || !std::isfinite(d))
      throw FactorizationError("ilu: zero pivot in row " + std::to_string(i));
    for (int p = b; p < e; ++p) pos[pat.idx[p]] = -1;
  }
  IluFactors f;
  f.diag_pos = std::move(pat.diag);
  f.fill_level = fill_level;
  f.lu = CsrMatrix(n, n, std::move(pat.ptr), std::move(pat.idx), std::move(val));
  return f;
}

void ilu_apply(const IluFactors& f, std::span<const double> r, std::span<double> z) {
  const int n = f.lu.rows();
  if (static_cast<int>(r.size()) != n || static_cast<int>(z.size()) != n)
    throw std::invalid_argument("ilu apply: dimension mismatch");
  const auto ptr = f.lu.row_ptr();
  const auto idx = f.lu.col_idx();
  const auto val = f.lu.values();
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (int p = ptr[i]; p < f.diag_pos[i]; ++p) s -= val[p] * z[idx[p]];
    z[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = z[i];
    for (int p = f.diag_pos[i] + 1; p < ptr[i + 1]; ++p) s -= val[p] * z[idx[p]];
    z[i] = s / val[f.diag_pos[i]];
  }
}

std::vector<int> RowPartition::ids() const {
  std::vector<int> id(offsets.back());
  for (int p = 0; p < count(); ++p)
    std::fill(id.begin() + offsets[p], id.begin() + offsets[p + 1], p);
  return id;
}

BlockJacobiIlu::BlockJacobiIlu(const CsrMatrix& a, RowPartition partition, int fill_level)
    : n_(a.rows()), partition_(std::move(partition)) {
  if (partition_.offsets.empty() || partition_.offsets.front() != 0 ||
      partition_.offsets.back() != n_)
    throw std::invalid_argument("block jacobi: partition does not cover all rows");
  for (int p = 0; p < partition_.count(); ++p) {
    const int b = partition_.offsets[p], e = partition_.offsets[p + 1];
    if (e < b) throw std::invalid_argument("block jacobi: decreasing partition offsets");
    try {
      blocks_.push_back(ilu_factor(a.diagonal_block(b, e), fill_level));
    } catch (const FactorizationError& err) {
      throw FactorizationError("block jacobi subdomain " + std::to_string(p) + ": " + err.what());
    }
  }
}

void BlockJacobiIlu::apply(std::span<const double> r, std::span<double> z) const {
  for (int p = 0; p < partition_.count(); ++p) {
    const int b = partition_.offsets[p], e = partition_.offsets[p + 1];
    ilu_apply(blocks_[p], r.subspan(b, e - b), z.subspan(b, e - b));
  }
}

}  // namespace thermoflow
