#include "thermoflow/amg.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "thermoflow/sparse/dense.hpp"
#include "thermoflow/sparse/direct.hpp"

namespace thermoflow {

namespace {

constexpr int kDenseCoarseLimit = 400;

bool same_label(std::span<const int> labels, int i, int j) {
  return labels.empty() || labels[i] == labels[j];
}

enum : char { kUndecided = 0, kCoarse = 1, kFine = 2 };

void gauss_seidel(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                  bool forward) {
  const int n = a.rows();
  const auto ptr = a.row_ptr();
  const auto col = a.col_idx();
  const auto val = a.values();
  for (int step = 0; step < n; ++step) {
    const int i = forward ? step : n - 1 - step;
    double sum = b[i], diag = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) {
      if (col[k] == i)
        diag = val[k];
      else
        sum -= val[k] * x[col[k]];
    }
    if (diag != 0.0) x[i] = sum / diag;
  }
}

}  // namespace

void AmgParams::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("amg: theta must lie in (0, 1)");
  if (max_levels < 1) throw std::invalid_argument("amg: max_levels must be >= 1");
  if (coarse_size < 1) throw std::invalid_argument("amg: coarse_size must be >= 1");
  if (!(max_coarse_fraction > 0.0 && max_coarse_fraction < 1.0))
    throw std::invalid_argument("amg: max_coarse_fraction must lie in (0, 1)");
}

std::vector<std::vector<int>> strength_graph(const CsrMatrix& a, double theta,
                                             std::span<const int> labels) {
  const int n = a.rows();
  std::vector<std::vector<int>> strong(n);
  for (int i = 0; i < n; ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_vals(i);
    const double diag = a.coeff(i, i);
    const double s = diag < 0.0 ? -1.0 : 1.0;
    double neg_max = 0.0, neg_sum = 0.0, pos_sum = 0.0, abs_max = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = cols[k];
      if (j == i || !same_label(labels, i, j)) continue;
      const double v = -s * vals[k];
      if (v > 0.0) {
        neg_max = std::max(neg_max, v);
        neg_sum += v;
      } else {
        pos_sum -= v;
      }
      abs_max = std::max(abs_max, std::abs(v));
    }
    const bool signed_mode = neg_max > 0.0 && neg_sum >= pos_sum;
    const double cut = theta * (signed_mode ? neg_max : abs_max);
    if (cut <= 0.0) continue;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = cols[k];
      if (j == i || !same_label(labels, i, j)) continue;
      const double v = signed_mode ? -s * vals[k] : std::abs(vals[k]);
      if (v >= cut && v > 0.0) strong[i].push_back(j);
    }
  }
  return strong;
}

std::vector<char> rs_coarsen(const std::vector<std::vector<int>>& strong) {
  const int n = static_cast<int>(strong.size());
  std::vector<std::vector<int>> influences(n);
  for (int i = 0; i < n; ++i)
    for (int j : strong[i]) influences[j].push_back(i);

  std::vector<char> state(n, kUndecided);
  std::vector<int> lambda(n);
  using Entry = std::pair<int, int>;  // (lambda, -index): largest lambda, then lowest index
  std::priority_queue<Entry> queue;
  for (int i = 0; i < n; ++i) {
    lambda[i] = static_cast<int>(influences[i].size());
    if (strong[i].empty() && influences[i].empty())
      state[i] = kFine;  // isolated: left to the smoother
    else
      queue.push({lambda[i], -i});
  }
  while (!queue.empty()) {
    const auto [lam, neg_i] = queue.top();
    queue.pop();
    const int i = -neg_i;
    if (state[i] != kUndecided || lam != lambda[i]) continue;
    if (lam == 0) {
      state[i] = kFine;
      continue;
    }
    state[i] = kCoarse;
    for (int j : influences[i]) {
      if (state[j] != kUndecided) continue;
      state[j] = kFine;
      for (int k : strong[j])
        if (state[k] == kUndecided) queue.push({++lambda[k], -k});
    }
    for (int k : strong[i])
      if (state[k] == kUndecided && lambda[k] > 0) queue.push({--lambda[k], -k});
  }

  // Second pass: strongly coupled F points must share a strong C point.
  std::vector<int> mark(n, -1);
  for (int i = 0; i < n; ++i) {
    if (state[i] != kFine) continue;
    for (int j : strong[i])
      if (state[j] == kCoarse) mark[j] = i;
    for (int j : strong[i]) {
      if (state[j] != kFine) continue;
      bool shared = false;
      for (int k : strong[j])
        if (mark[k] == i) {
          shared = true;
          break;
        }
      if (!shared) {
        state[j] = kCoarse;
        mark[j] = i;
      }
    }
  }
  std::vector<char> coarse(n);
  for (int i = 0; i < n; ++i) coarse[i] = state[i] == kCoarse;
  return coarse;
}

CsrMatrix classical_interpolation(const CsrMatrix& a, const std::vector<std::vector<int>>& strong,
                                  const std::vector<char>& is_coarse, std::span<const int> labels) {
  const int n = a.rows();
  std::vector<int> cidx(n, -1);
  int nc = 0;
  for (int i = 0; i < n; ++i)
    if (is_coarse[i]) cidx[i] = nc++;

  std::vector<int> ptr(n + 1, 0), idx;
  std::vector<double> val;
  std::vector<int> slot(n, -1);       // position of a strong C neighbour in the current row
  std::vector<char> is_strong(n, 0);  // strong dependency marker for the current row
  std::vector<double> w;
  std::vector<int> cs;
  for (int i = 0; i < n; ++i) {
    if (is_coarse[i]) {
      idx.push_back(cidx[i]);
      val.push_back(1.0);
      ptr[i + 1] = static_cast<int>(idx.size());
      continue;
    }
    cs.clear();
    for (int j : strong[i]) {
      is_strong[j] = 1;
      if (is_coarse[j]) {
        slot[j] = static_cast<int>(cs.size());
        cs.push_back(j);
      }
    }
    w.assign(cs.size(), 0.0);
    double diag = 0.0;
    const auto cols = a.row_cols(i);
    const auto vals = a.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const int j = cols[k];
      if (j == i) {
        diag += vals[k];
        continue;
      }
      if (!same_label(labels, i, j)) continue;
      if (slot[j] >= 0) {
        w[slot[j]] += vals[k];
      } else if (is_strong[j]) {
        // Strong F neighbour: distribute over the common C points, using only
        // entries of sign opposite to its diagonal.
        const double djj = a.coeff(j, j);
        const auto jc = a.row_cols(j);
        const auto jv = a.row_vals(j);
        double denom = 0.0;
        for (std::size_t q = 0; q < jc.size(); ++q)
          if (slot[jc[q]] >= 0 && jv[q] * djj < 0.0) denom += jv[q];
        if (denom == 0.0) {
          diag += vals[k];
          continue;
        }
        for (std::size_t q = 0; q < jc.size(); ++q)
          if (slot[jc[q]] >= 0 && jv[q] * djj < 0.0) w[slot[jc[q]]] += vals[k] * jv[q] / denom;
      } else {
        diag += vals[k];
      }
    }
    if (diag == 0.0) diag = a.coeff(i, i);
    std::vector<std::pair<int, double>> row;
    for (std::size_t q = 0; q < cs.size(); ++q)
      if (w[q] != 0.0) row.emplace_back(cidx[cs[q]], -w[q] / diag);
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      idx.push_back(c);
      val.push_back(v);
    }
    ptr[i + 1] = static_cast<int>(idx.size());
    for (int j : strong[i]) {
      is_strong[j] = 0;
      slot[j] = -1;
    }
  }
  return CsrMatrix(n, nc, std::move(ptr), std::move(idx), std::move(val));
}

AmgHierarchy build_hierarchy(const CsrMatrix& a, std::vector<int> labels, const AmgParams& params) {
  params.validate();
  if (a.rows() != a.cols()) throw AmgSetupError("amg: matrix is not square");
  for (int i = 0; i < a.rows(); ++i)
    if (a.coeff(i, i) == 0.0) throw AmgSetupError("amg: zero diagonal in row " + std::to_string(i));
  if (labels.empty()) labels.assign(a.rows(), 0);
  if (static_cast<int>(labels.size()) != a.rows())
    throw AmgSetupError("amg: label count does not match the matrix");

  AmgHierarchy h;
  h.levels_.push_back({a, {}, {}, std::move(labels)});
  while (static_cast<int>(h.levels_.size()) < params.max_levels) {
    AmgLevel& fine = h.levels_.back();
    const int n = fine.A.rows();
    std::vector<int> per_label;
    for (int l : fine.labels) {
      if (l >= static_cast<int>(per_label.size())) per_label.resize(l + 1, 0);
      ++per_label[l];
    }
    if (*std::max_element(per_label.begin(), per_label.end()) <= params.coarse_size) break;
    const auto strong = strength_graph(fine.A, params.theta, fine.labels);
    const auto coarse = rs_coarsen(strong);
    const int nc = static_cast<int>(std::count(coarse.begin(), coarse.end(), 1));
    if (nc == 0 || nc > params.max_coarse_fraction * n) break;
    CsrMatrix P = classical_interpolation(fine.A, strong, coarse, fine.labels);
    CsrMatrix R = P.transpose();
    CsrMatrix Ac = multiply(R, multiply(fine.A, P));
    std::vector<int> coarse_labels;
    coarse_labels.reserve(nc);
    for (int i = 0; i < n; ++i)
      if (coarse[i]) coarse_labels.push_back(fine.labels[i]);
    fine.P = std::move(P);
    fine.R = std::move(R);
    h.levels_.push_back({std::move(Ac), {}, {}, std::move(coarse_labels)});
  }
  const CsrMatrix& last = h.levels_.back().A;
  try {
    if (last.rows() <= kDenseCoarseLimit)
      h.coarse_ = std::make_shared<DenseLu>(last);
    else
      h.coarse_ = std::make_shared<SparseDirectSolver>(last);
  } catch (const SingularMatrixError& e) {
    throw AmgSetupError(std::string("amg: coarsest level is singular: ") + e.what());
  }
  return h;
}

AmgHierarchy amg_setup(const CsrMatrix& a, const AmgParams& params) {
  return build_hierarchy(a, {}, params);
}

AmgHierarchy uamg_setup(const CsrMatrix& a, std::vector<int> labels, const AmgParams& params) {
  if (static_cast<int>(labels.size()) != a.rows())
    throw AmgSetupError("uamg: one label per row is required");
  return build_hierarchy(a, std::move(labels), params);
}

std::vector<int> AmgHierarchy::level_sizes() const {
  std::vector<int> s;
  for (const auto& l : levels_) s.push_back(l.A.rows());
  return s;
}

void AmgHierarchy::cycle(int l, std::span<const double> b, std::span<double> x) const {
  if (l + 1 == num_levels()) {
    coarse_->apply(b, x);
    return;
  }
  const AmgLevel& lev = levels_[l];
  const int n = lev.A.rows();
  std::fill(x.begin(), x.end(), 0.0);
  gauss_seidel(lev.A, b, x, true);
  std::vector<double> r(n);
  lev.A.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const int nc = lev.P.cols();
  std::vector<double> bc(nc), xc(nc);
  lev.R.multiply(r, bc);
  cycle(l + 1, bc, xc);
  lev.P.multiply(xc, r);
  for (int i = 0; i < n; ++i) x[i] += r[i];
  gauss_seidel(lev.A, b, x, false);
}

void AmgHierarchy::apply(std::span<const double> b, std::span<double> x) const {
  if (levels_.empty()) throw AmgSetupError("amg: hierarchy was not set up");
  cycle(0, b, x);
}

std::vector<double> amg_vcycle(const AmgHierarchy& h, std::span<const double> b) {
  std::vector<double> x(b.size());
  h.apply(b, x);
  return x;
}

}  // namespace thermoflow
