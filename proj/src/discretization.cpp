#include "thermoflow/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "thermoflow/dual.hpp"

namespace thermoflow {

namespace {

using D3 = Dual<3>;
using D6 = Dual<6>;

void require_size(std::size_t actual, int expected, const char* what) {
  if (static_cast<int>(actual) != expected)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " entries, got " + std::to_string(actual));
}

/// Property evaluations of one cell, as duals over that cell's (p, T, S_o).
struct CellQuantities {
  D3 rho_w, rho_o;
  D3 mob_w, mob_o;    // rho k_r / mu
  D3 emob_w, emob_o;  // c_v rho k_r / mu T
  D3 lam_w, lam_o;    // k_r / mu
  D3 k_T;
};

CellQuantities evaluate_cell(const ReservoirModel& m, const State& x, int c) {
  const auto& pc = m.props;
  const D3 p = D3::variable(x.p[c], 0);
  const D3 T = D3::variable(x.T[c], 1);
  (void)p;
  const double s = x.s_o[c];
  const bool inside = s >= 0.0 && s <= 1.0;
  const double sc = clamp_saturation(s);
  D3 kro(sc), krw(1.0 - sc);
  if (inside) {
    kro.d[2] = 1.0;
    krw.d[2] = -1.0;
  }
  CellQuantities q;
  q.rho_w = from_prop(water_density(pc, x.p[c], x.T[c]));
  q.rho_o = from_prop(oil_density(pc, x.p[c], x.T[c]));
  const D3 mu_w = from_prop(water_viscosity(pc, x.T[c]));
  const D3 mu_o = from_prop(oil_viscosity(pc, x.T[c]));
  q.lam_w = krw / mu_w;
  q.lam_o = kro / mu_o;
  q.mob_w = q.rho_w * q.lam_w;
  q.mob_o = q.rho_o * q.lam_o;
  q.emob_w = pc.c_v_water * q.mob_w * T;
  q.emob_o = pc.c_v_oil * q.mob_o * T;
  q.k_T = D3(thermal_conductivity(pc, m.phi[c], sc));
  if (inside) q.k_T.d[2] = m.phi[c] * (pc.k_T_oil - pc.k_T_water);
  return q;
}

bool finite(const D3& x) {
  if (!std::isfinite(x.v)) return false;
  for (double d : x.d)
    if (!std::isfinite(d)) return false;
  return true;
}

std::vector<CellQuantities> evaluate_cells(const ReservoirModel& m, const State& x) {
  const int n = m.num_cells();
  std::vector<CellQuantities> q(n);
  std::vector<std::string> errors(n);
  int bad = n;
#pragma omp parallel for schedule(static) reduction(min : bad)
  for (int c = 0; c < n; ++c) {
    try {
      q[c] = evaluate_cell(m, x, c);
      const auto& e = q[c];
      if (!(finite(e.rho_w) && finite(e.rho_o) && finite(e.mob_w) && finite(e.mob_o) &&
            finite(e.emob_w) && finite(e.emob_o) && finite(e.k_T))) {
        errors[c] = "non-finite property value";
        bad = std::min(bad, c);
      }
    } catch (const std::exception& ex) {
      errors[c] = ex.what();
      bad = std::min(bad, c);
    }
  }
  if (bad < n)
    throw AssemblyError("assembly failed in cell " + std::to_string(bad) + " (p=" +
                        std::to_string(x.p[bad]) + ", T=" + std::to_string(x.T[bad]) +
                        ", S_o=" + std::to_string(x.s_o[bad]) + "): " + errors[bad]);
  return q;
}

/// Cell-local accumulation of (water, energy, oil), per unit time.
std::array<D3, 3> accumulation(const ReservoirModel& m, const State& x, int c, bool active) {
  const auto& pc = m.props;
  const double phi = m.phi[c];
  const double scale = m.grid.cell_volume() / m.dt;
  D3 rho_w, rho_o, T, s;
  if (active) {
    rho_w = from_prop(water_density(pc, x.p[c], x.T[c]));
    rho_o = from_prop(oil_density(pc, x.p[c], x.T[c]));
    T = D3::variable(x.T[c], 1);
    s = D3::variable(x.s_o[c], 2);
  } else {
    rho_w = D3(water_density(pc, x.p[c], x.T[c]).value);
    rho_o = D3(oil_density(pc, x.p[c], x.T[c]).value);
    T = D3(x.T[c]);
    s = D3(x.s_o[c]);
  }
  const D3 sw = D3(1.0) - s;
  const D3 mw = phi * rho_w * sw * scale;
  const D3 mo = phi * rho_o * s * scale;
  const D3 heat = (phi * (pc.c_v_water * rho_w * sw + pc.c_v_oil * rho_o * s) +
                   D3((1.0 - phi) * pc.rho_rock * pc.c_v_rock)) *
                  T * scale;
  return {mw, heat, mo};
}

D3 positive_part(const D3& x) { return x.v > 0.0 ? x : D3(0.0); }

/// Source contributions to (F_w, F_e, F_o) for one cell, i.e. minus f.
std::array<D3, 3> source_terms(const ReservoirModel& m, const State& x, const SourceTerm& src,
                               int c, double w, const CellQuantities& q) {
  const auto& pc = m.props;
  const D3 T = D3::variable(x.T[c], 1);
  std::array<D3, 3> r{};
  switch (src.kind) {
    case SourceKind::injector_const_rate: {
      const D3 rho_inj = from_prop(water_density(pc, x.p[c], src.T_inj));
      D3 rho_p = rho_inj;
      rho_p.d[1] = 0.0;  // evaluated at the fixed injection temperature
      const double qv = src.rate * w;
      r[0] = -(qv * rho_p);
      r[1] = -(qv * pc.c_v_water * src.T_inj * rho_p);
      break;
    }
    case SourceKind::producer_const_rate:
    case SourceKind::producer_bhp: {
      D3 qw, qo;
      if (src.kind == SourceKind::producer_const_rate) {
        const D3 total = q.lam_w + q.lam_o;
        qw = src.rate * w * q.lam_w / total;
        qo = src.rate * w * q.lam_o / total;
      } else {
        const D3 dp = positive_part(D3::variable(x.p[c], 0) - D3(src.p_bhp));
        qw = src.well_index * w * q.lam_w * dp;
        qo = src.well_index * w * q.lam_o * dp;
      }
      r[0] = qw * q.rho_w;
      r[2] = qo * q.rho_o;
      r[1] = (pc.c_v_water * qw * q.rho_w + pc.c_v_oil * qo * q.rho_o) * T;
      break;
    }
    case SourceKind::heater:
      r[1] = -(src.U_heater * w * (D3(src.T_heater) - T));
      break;
  }
  return r;
}

/// Dense 3x3 cell-block sparsity of the Jacobian (the 7-point stencil).
struct BlockPattern {
  std::vector<int> ptr;
  std::vector<int> col;
  std::vector<int> diag;
  std::vector<std::array<int, 4>> facet_pos;  // (pp, pm, mp, mm)

  explicit BlockPattern(const StructuredGrid& g) {
    const int n = g.num_cells();
    std::vector<std::vector<int>> nb(n);
    for (int c = 0; c < n; ++c) nb[c].push_back(c);
    for (const auto& f : g.facets()) {
      nb[f.cell_plus].push_back(f.cell_minus);
      nb[f.cell_minus].push_back(f.cell_plus);
    }
    ptr.assign(n + 1, 0);
    diag.resize(n);
    for (int c = 0; c < n; ++c) {
      std::sort(nb[c].begin(), nb[c].end());
      ptr[c + 1] = ptr[c] + static_cast<int>(nb[c].size());
      for (int j : nb[c]) {
        if (j == c) diag[c] = static_cast<int>(col.size());
        col.push_back(j);
      }
    }
    facet_pos.reserve(g.num_facets());
    for (const auto& f : g.facets())
      facet_pos.push_back({diag[f.cell_plus], find(f.cell_plus, f.cell_minus),
                           find(f.cell_minus, f.cell_plus), diag[f.cell_minus]});
  }

  int find(int r, int c) const {
    const auto b = col.begin() + ptr[r], e = col.begin() + ptr[r + 1];
    return static_cast<int>(std::lower_bound(b, e, c) - col.begin());
  }
};

using Block = std::array<double, 9>;  // [equation (w, e, o)][variable (p, T, s)]

struct Assembly {
  ResidualVector residual;
  std::vector<Block> blocks;  // empty unless the Jacobian was requested
};

void add_cell(Block& b, int eq, const D3& x, double sign = 1.0) {
  for (int v = 0; v < 3; ++v) b[eq * 3 + v] += sign * x.d[v];
}

void add_facet(std::vector<Block>& blocks, const std::array<int, 4>& pos, int eq, const D6& x) {
  for (int v = 0; v < 3; ++v) {
    blocks[pos[0]][eq * 3 + v] += x.d[v];
    blocks[pos[1]][eq * 3 + v] += x.d[3 + v];
    blocks[pos[2]][eq * 3 + v] -= x.d[v];
    blocks[pos[3]][eq * 3 + v] -= x.d[3 + v];
  }
}

const std::vector<double>& perm_along(const ReservoirModel& m, Axis a) {
  switch (a) {
    case Axis::x: return m.perm_x;
    case Axis::y: return m.perm_y;
    default: return m.perm_z;
  }
}

Assembly assemble(const ReservoirModel& m, const State& x, const State& prev, bool jacobian,
                  const BlockPattern* pattern) {
  const int n = m.num_cells();
  x.check_size(n);
  prev.check_size(n);
  require_size(m.phi.size(), n, "porosity");
  const auto q = evaluate_cells(m, x);
  Assembly out;
  auto& r = out.residual;
  r.F_w.assign(n, 0.0);
  r.F_e.assign(n, 0.0);
  r.F_o.assign(n, 0.0);
  if (jacobian) out.blocks.assign(pattern->col.size(), Block{});

  for (int c = 0; c < n; ++c) {
    const auto acc = accumulation(m, x, c, true);
    const auto acc0 = accumulation(m, prev, c, false);
    r.F_w[c] += acc[0].v - acc0[0].v;
    r.F_e[c] += acc[1].v - acc0[1].v;
    r.F_o[c] += acc[2].v - acc0[2].v;
    if (jacobian)
      for (int e = 0; e < 3; ++e) add_cell(out.blocks[pattern->diag[c]], e, acc[e]);
  }

  for (const auto& src : m.sources)
    for (const auto& [c, w] : src.cells) {
      const auto s = source_terms(m, x, src, c, w, q[c]);
      r.F_w[c] += s[0].v;
      r.F_e[c] += s[1].v;
      r.F_o[c] += s[2].v;
      if (jacobian)
        for (int e = 0; e < 3; ++e) add_cell(out.blocks[pattern->diag[c]], e, s[e]);
    }

  const auto facets = m.grid.facets();
  for (std::size_t fi = 0; fi < facets.size(); ++fi) {
    const auto& f = facets[fi];
    const int a = f.cell_plus, b = f.cell_minus;
    const auto& perm = perm_along(m, f.axis);
    const double trans = harmonic_average(perm[a], perm[b]) * f.area;
    const double g_n = f.axis == Axis::z ? m.gravity : 0.0;
    const D6 pa = lift<6>(D3::variable(x.p[a], 0), 0);
    const D6 pb = lift<6>(D3::variable(x.p[b], 0), 3);
    const D6 dp_h = (pa - pb) / f.center_distance;

    const D3* phase_rho[2] = {&q[a].rho_w, &q[a].rho_o};
    const D3* phase_rho_b[2] = {&q[b].rho_w, &q[b].rho_o};
    for (int ph = 0; ph < 2; ++ph) {
      const D6 rho_avg = 0.5 * (lift<6>(*phase_rho[ph], 0) + lift<6>(*phase_rho_b[ph], 3));
      const D6 drive = dp_h - rho_avg * g_n;
      const bool up_plus = drive.v >= 0.0;
      const int up = up_plus ? a : b;
      const int off = up_plus ? 0 : 3;
      const D3& mob = ph == 0 ? q[up].mob_w : q[up].mob_o;
      const D3& emob = ph == 0 ? q[up].emob_w : q[up].emob_o;
      const D6 flux = trans * (lift<6>(mob, off) * drive);
      const D6 eflux = trans * (lift<6>(emob, off) * drive);
      auto& F_mass = ph == 0 ? r.F_w : r.F_o;
      F_mass[a] += flux.v;
      F_mass[b] -= flux.v;
      r.F_e[a] += eflux.v;
      r.F_e[b] -= eflux.v;
      if (jacobian) {
        add_facet(out.blocks, pattern->facet_pos[fi], ph == 0 ? 0 : 2, flux);
        add_facet(out.blocks, pattern->facet_pos[fi], 1, eflux);
      }
    }
    const D6 ka = lift<6>(q[a].k_T, 0), kb = lift<6>(q[b].k_T, 3);
    const D6 ksum = ka + kb;
    const D6 kh = ksum.v > 0.0 ? 2.0 * (ka * kb) / ksum : D6(0.0);
    const D6 Ta = lift<6>(D3::variable(x.T[a], 1), 0);
    const D6 Tb = lift<6>(D3::variable(x.T[b], 1), 3);
    const D6 cond = (f.area / f.center_distance) * (kh * (Ta - Tb));
    r.F_e[a] += cond.v;
    r.F_e[b] -= cond.v;
    if (jacobian) add_facet(out.blocks, pattern->facet_pos[fi], 1, cond);
  }
  return out;
}

}  // namespace

State State::uniform(int n, double p, double T, double s_o) {
  return {std::vector<double>(n, p), std::vector<double>(n, T), std::vector<double>(n, s_o)};
}

void State::check_size(int n) const {
  if (static_cast<int>(p.size()) != n || static_cast<int>(T.size()) != n ||
      static_cast<int>(s_o.size()) != n)
    throw std::invalid_argument("state: field lengths do not match the cell count " +
                                std::to_string(n));
}

void SourceTerm::validate(int num_cells) const {
  if (cells.empty()) throw std::invalid_argument("source: empty cell set");
  double total = 0.0;
  for (const auto& [c, w] : cells) {
    if (c < 0 || c >= num_cells) throw std::invalid_argument("source: cell index out of range");
    if (!(w >= 0.0)) throw std::invalid_argument("source: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("source: weights do not sum to 1");
  if (rate < 0.0 || U_heater < 0.0 || well_index < 0.0)
    throw std::invalid_argument("source: negative rate");
}

std::vector<std::pair<int, double>> cells_in_box(const StructuredGrid& g,
                                                 const std::array<double, 3>& lo,
                                                 const std::array<double, 3>& hi) {
  std::vector<std::pair<int, double>> out;
  double total = 0.0;
  const auto& h = g.spacing();
  std::array<int, 3> first{}, last{};
  for (int a = 0; a < 3; ++a) {
    first[a] = std::max(0, static_cast<int>(std::floor(lo[a] / h[a])));
    last[a] = std::min(g.dims()[a] - 1, static_cast<int>(std::ceil(hi[a] / h[a])) - 1);
  }
  for (int k = first[2]; k <= last[2]; ++k)
    for (int j = first[1]; j <= last[1]; ++j)
      for (int i = first[0]; i <= last[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        double vol = 1.0;
        for (int a = 0; a < 3; ++a) {
          const double c0 = idx[a] * h[a], c1 = c0 + h[a];
          vol *= std::max(0.0, std::min(c1, hi[a]) - std::max(c0, lo[a]));
        }
        if (vol > 1e-12 * g.cell_volume()) {
          out.emplace_back(g.index(i, j, k), vol);
          total += vol;
        }
      }
  if (out.empty()) throw std::invalid_argument("cells_in_box: box does not overlap the grid");
  for (auto& [c, w] : out) w /= total;
  return out;
}

ReservoirModel::ReservoirModel(StructuredGrid g)
    : grid(std::move(g)),
      phi(grid.num_cells(), 0.2),
      perm_x(grid.num_cells(), 3e-13),
      perm_y(grid.num_cells(), 3e-13),
      perm_z(grid.num_cells(), 3e-13) {}

void ReservoirModel::validate() const {
  const int n = num_cells();
  require_size(phi.size(), n, "porosity");
  require_size(perm_x.size(), n, "perm_x");
  require_size(perm_y.size(), n, "perm_y");
  require_size(perm_z.size(), n, "perm_z");
  for (int c = 0; c < n; ++c) {
    if (!(phi[c] > 0.0 && phi[c] < 1.0))
      throw std::invalid_argument("model: porosity outside (0, 1) in cell " + std::to_string(c));
    if (!(perm_x[c] > 0.0 && perm_y[c] > 0.0 && perm_z[c] > 0.0))
      throw std::invalid_argument("model: non-positive permeability in cell " + std::to_string(c));
  }
  if (!(dt > 0.0)) throw std::invalid_argument("model: dt must be > 0");
  if (gravity < 0.0) throw std::invalid_argument("model: gravity magnitude must be >= 0");
  props.validate();
  for (const auto& s : sources) s.validate(n);
}

double WeightedResidual::norm2() const {
  double s = 0.0;
  for (const auto* v : {&F_p, &F_e, &F_o})
    for (double x : *v) s += x * x;
  return std::sqrt(s);
}

double driving_force(const InteriorFacet& f, double p_plus, double p_minus, double rho_avg,
                     double gravity) {
  const double g_n = f.axis == Axis::z ? gravity : 0.0;
  return (p_plus - p_minus) / f.center_distance - rho_avg * g_n;
}

Side upwind_side(const InteriorFacet& f, std::span<const double> p, double rho_avg, double gravity) {
  return driving_force(f, p[f.cell_plus], p[f.cell_minus], rho_avg, gravity) >= 0.0 ? Side::plus
                                                                                    : Side::minus;
}

ResidualVector assemble_residual(const ReservoirModel& m, const State& x, const State& prev) {
  return assemble(m, x, prev, false, nullptr).residual;
}

ResidualVector assemble_accumulation(const ReservoirModel& m, const State& x, const State& prev) {
  const int n = m.num_cells();
  x.check_size(n);
  prev.check_size(n);
  ResidualVector r;
  r.F_w.resize(n);
  r.F_e.resize(n);
  r.F_o.resize(n);
  for (int c = 0; c < n; ++c) {
    const auto a = accumulation(m, x, c, false);
    const auto a0 = accumulation(m, prev, c, false);
    r.F_w[c] = a[0].v - a0[0].v;
    r.F_e[c] = a[1].v - a0[1].v;
    r.F_o[c] = a[2].v - a0[2].v;
  }
  return r;
}

std::array<std::array<double, 3>, 3> equation_weights(const ReservoirModel& m) {
  const double sp = m.scaling.enabled ? m.scaling.T_ref : 1.0;
  const double so = m.scaling.enabled ? m.scaling.c_ref * m.scaling.T_ref : 1.0;
  return {{{sp * m.props.c_v_water, 0.0, sp * m.props.c_v_oil}, {0.0, 1.0, 0.0}, {0.0, 0.0, so}}};
}

WeightedResidual apply_weighting_and_scaling(const ReservoirModel& m, const ResidualVector& r) {
  const auto W = equation_weights(m);
  const std::size_t n = r.F_w.size();
  WeightedResidual out;
  out.F_p.resize(n);
  out.F_e.resize(n);
  out.F_o.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double in[3] = {r.F_w[c], r.F_e[c], r.F_o[c]};
    double* dst[3] = {&out.F_p[c], &out.F_e[c], &out.F_o[c]};
    for (int i = 0; i < 3; ++i) *dst[i] = W[i][0] * in[0] + W[i][1] * in[1] + W[i][2] * in[2];
  }
  return out;
}

std::vector<int> slab_partition(const StructuredGrid& g, int subdomains) {
  if (subdomains < 1) throw std::invalid_argument("partition: subdomain count must be >= 1");
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (g.extents()[a] > g.extents()[axis] && g.dims()[a] > 1) axis = a;
  if (g.dims()[axis] == 1)
    for (int a = 0; a < 3; ++a)
      if (g.dims()[a] > g.dims()[axis]) axis = a;
  const int layers = g.dims()[axis];
  if (subdomains > layers)
    throw std::invalid_argument("partition: more subdomains than layers along the slab axis");
  std::vector<int> id(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    const int l = g.ijk(c)[axis];
    id[c] = static_cast<int>(static_cast<long>(l) * subdomains / layers);
  }
  return id;
}

DofLayout::DofLayout(int num_cells, Ordering ordering, const std::vector<int>& cell_subdomain)
    : num_cells_(num_cells), ordering_(ordering) {
  std::vector<int> sub = cell_subdomain;
  if (sub.empty()) sub.assign(num_cells, 0);
  if (static_cast<int>(sub.size()) != num_cells)
    throw std::invalid_argument("dof layout: partition size mismatch");
  const int P = sub.empty() ? 1 : *std::max_element(sub.begin(), sub.end()) + 1;
  std::vector<int> counts(P, 0);
  for (int s : sub) {
    if (s < 0) throw std::invalid_argument("dof layout: negative subdomain id");
    ++counts[s];
  }
  partition_.offsets.assign(P + 1, 0);
  for (int s = 0; s < P; ++s) partition_.offsets[s + 1] = partition_.offsets[s] + 3 * counts[s];
  for (auto& r : rows_) r.resize(num_cells);
  std::vector<int> local(P, 0);
  for (int c = 0; c < num_cells; ++c) {
    const int s = sub[c];
    const int l = local[s]++;
    const int base = partition_.offsets[s];
    for (int f = 0; f < 3; ++f)
      rows_[f][c] = ordering == Ordering::field_wise ? base + f * counts[s] + l : base + 3 * l + f;
  }
}

std::vector<int> DofLayout::rows(std::initializer_list<Field> fields) const {
  std::vector<int> out;
  for (Field f : fields) {
    const auto& r = rows(f);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::vector<double> DofLayout::pack(const WeightedResidual& r) const {
  return pack(r.F_p, r.F_e, r.F_o);
}

std::vector<double> DofLayout::pack(std::span<const double> p, std::span<const double> T,
                                    std::span<const double> s) const {
  std::vector<double> out(size());
  for (int c = 0; c < num_cells_; ++c) {
    out[rows_[0][c]] = p[c];
    out[rows_[1][c]] = T[c];
    out[rows_[2][c]] = s[c];
  }
  return out;
}

void DofLayout::unpack(std::span<const double> x, std::span<double> p, std::span<double> T,
                       std::span<double> s) const {
  for (int c = 0; c < num_cells_; ++c) {
    p[c] = x[rows_[0][c]];
    T[c] = x[rows_[1][c]];
    s[c] = x[rows_[2][c]];
  }
}

CsrMatrix BlockSystem::block(Field r, Field c) const {
  return matrix.extract(layout.rows(r), layout.rows(c));
}

CsrMatrix BlockSystem::block(std::initializer_list<Field> r, std::initializer_list<Field> c) const {
  return matrix.extract(layout.rows(r), layout.rows(c));
}

namespace {

CsrMatrix blocks_to_csr(const BlockPattern& pat, const std::vector<Block>& blocks,
                        const DofLayout& layout) {
  const int n = layout.num_cells();
  const int rows = layout.size();
  std::vector<int> len(rows, 0);
  for (int c = 0; c < n; ++c)
    for (int f = 0; f < 3; ++f) len[layout.row(static_cast<Field>(f), c)] = 3 * (pat.ptr[c + 1] - pat.ptr[c]);
  std::vector<int> ptr(rows + 1, 0);
  for (int r = 0; r < rows; ++r) ptr[r + 1] = ptr[r] + len[r];
  std::vector<int> idx(ptr.back());
  std::vector<double> val(ptr.back());
  std::vector<std::pair<int, double>> row;
  for (int c = 0; c < n; ++c)
    for (int f = 0; f < 3; ++f) {
      row.clear();
      for (int k = pat.ptr[c]; k < pat.ptr[c + 1]; ++k)
        for (int g = 0; g < 3; ++g)
          row.emplace_back(layout.row(static_cast<Field>(g), pat.col[k]), blocks[k][f * 3 + g]);
      std::sort(row.begin(), row.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      const int r = layout.row(static_cast<Field>(f), c);
      for (std::size_t q = 0; q < row.size(); ++q) {
        idx[ptr[r] + q] = row[q].first;
        val[ptr[r] + q] = row[q].second;
      }
    }
  return CsrMatrix(rows, rows, std::move(ptr), std::move(idx), std::move(val));
}

}  // namespace

LinearizedSystem linearize(const ReservoirModel& m, const State& x, const State& prev,
                           const DofLayout& layout) {
  if (layout.num_cells() != m.num_cells())
    throw std::invalid_argument("linearize: layout does not match the model");
  const BlockPattern pat(m.grid);
  Assembly a = assemble(m, x, prev, true, &pat);
  const auto W = equation_weights(m);
  for (auto& b : a.blocks) {
    Block t{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t[i * 3 + j] = W[i][0] * b[j] + W[i][1] * b[3 + j] + W[i][2] * b[6 + j];
    b = t;
  }
  LinearizedSystem out{BlockSystem{blocks_to_csr(pat, a.blocks, layout), layout}, {}, {}};
  out.weighted = apply_weighting_and_scaling(m, a.residual);
  out.residual = layout.pack(out.weighted);
  return out;
}

BlockSystem assemble_jacobian(const ReservoirModel& m, const State& x, const State& prev,
                              const DofLayout& layout) {
  return linearize(m, x, prev, layout).system;
}

PhaseRates source_phase_rates(const ReservoirModel& m, const SourceTerm& src, int c, double w,
                              const State& x) {
  PhaseRates out;
  switch (src.kind) {
    case SourceKind::injector_const_rate:
      out.water = src.rate * w;
      break;
    case SourceKind::producer_const_rate:
    case SourceKind::producer_bhp: {
      const double sc = clamp_saturation(x.s_o[c]);
      const double lw = (1.0 - sc) / water_viscosity(m.props, x.T[c]).value;
      const double lo = sc / oil_viscosity(m.props, x.T[c]).value;
      const double factor = src.kind == SourceKind::producer_const_rate
                                ? src.rate * w / (lw + lo)
                                : src.well_index * w * std::max(x.p[c] - src.p_bhp, 0.0);
      out.water = factor * lw;
      out.oil = factor * lo;
      break;
    }
    case SourceKind::heater:
      break;
  }
  return out;
}

CsrMatrix assemble_schur_approx(const ReservoirModel& m, const State& x) {
  const int n = m.num_cells();
  x.check_size(n);
  const auto& pc = m.props;
  const auto q = evaluate_cells(m, x);
  std::vector<Triplet> t;
  t.reserve(n + 4 * m.grid.num_facets());
  const double scale = m.grid.cell_volume() / m.dt;
  for (int c = 0; c < n; ++c) {
    const double phi = m.phi[c];
    const double s = clamp_saturation(x.s_o[c]);
    const double acc = (phi * (pc.c_v_water * (1.0 - s) * q[c].rho_w.v + pc.c_v_oil * s * q[c].rho_o.v) +
                        (1.0 - phi) * pc.rho_rock * pc.c_v_rock) *
                       scale;
    t.push_back({c, c, acc});
  }
  for (const auto& src : m.sources)
    for (const auto& [c, w] : src.cells) {
      if (src.kind == SourceKind::heater) {
        t.push_back({c, c, src.U_heater * w});
      } else if (src.kind != SourceKind::injector_const_rate) {
        const auto rates = source_phase_rates(m, src, c, w, x);
        t.push_back({c, c, pc.c_v_water * rates.water * q[c].rho_w.v +
                               pc.c_v_oil * rates.oil * q[c].rho_o.v});
      }
    }
  for (const auto& f : m.grid.facets()) {
    const int a = f.cell_plus, b = f.cell_minus;
    const auto& perm = perm_along(m, f.axis);
    const double trans = harmonic_average(perm[a], perm[b]) * f.area;
    for (int ph = 0; ph < 2; ++ph) {
      const double rho_avg =
          0.5 * (ph == 0 ? q[a].rho_w.v + q[b].rho_w.v : q[a].rho_o.v + q[b].rho_o.v);
      const double drive = driving_force(f, x.p[a], x.p[b], rho_avg, m.gravity);
      const int up = drive >= 0.0 ? a : b;
      const double cv = ph == 0 ? pc.c_v_water : pc.c_v_oil;
      const double mob = ph == 0 ? q[up].mob_w.v : q[up].mob_o.v;
      const double coef = trans * cv * mob * drive;
      t.push_back({a, up, coef});
      t.push_back({b, up, -coef});
    }
    const double kh = harmonic_average(q[a].k_T.v, q[b].k_T.v) * f.area / f.center_distance;
    t.push_back({a, a, kh});
    t.push_back({a, b, -kh});
    t.push_back({b, a, -kh});
    t.push_back({b, b, kh});
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace thermoflow
