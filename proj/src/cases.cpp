#include "thermoflow/bench/cases.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include "thermoflow/bench/fields.hpp"

namespace thermoflow::bench {

namespace {

constexpr double kDay = 86400.0;
constexpr double kInitialPressure = 4.1369e7;  // Pa
constexpr double kInitialTemperature = 288.706;  // K
constexpr double kHotTemperature = 373.15;  // K, injection and heater target
constexpr double kDefaultHeaterU = 10.0;  // W/K per heater

// 2D cases: 50 m x 50 m x 1 m, sources in 2.5 m boxes (one cell at N = 20)
// next to the left and right walls.
constexpr double kSide2d = 50.0;
// well-3d keeps the cell size of the 65^3 mesh of the 50 m cube, so the
// default N = 20 box is a 15.4 m corner of that problem.
constexpr double kCell3d = 50.0 / 65.0;
constexpr double kThickness2d = 1.0;
constexpr double kBox2d = 2.5;
constexpr double kRows2d[3][2] = {{10.0, 12.5}, {23.75, 26.25}, {37.5, 40.0}};

// spe10-slice: one 2 ft layer of the SPE10 footprint.
constexpr double kSliceLx = 365.76, kSliceLy = 670.56, kSliceLz = 0.6096;

void set_prop(PropertyConfig& p, const std::string& name, double v) {
  struct Entry {
    const char* name;
    double PropertyConfig::*field;
  };
  static const Entry table[] = {
      {"c_v_oil", &PropertyConfig::c_v_oil},         {"c_v_water", &PropertyConfig::c_v_water},
      {"c_v_rock", &PropertyConfig::c_v_rock},       {"rho_rock", &PropertyConfig::rho_rock},
      {"k_T_oil", &PropertyConfig::k_T_oil},         {"k_T_water", &PropertyConfig::k_T_water},
      {"k_T_rock", &PropertyConfig::k_T_rock},       {"visc_A", &PropertyConfig::visc_A},
      {"visc_B", &PropertyConfig::visc_B},           {"visc_C", &PropertyConfig::visc_C},
      {"C_w", &PropertyConfig::C_w},                 {"rho_ref", &PropertyConfig::rho_ref},
      {"c_compress", &PropertyConfig::c_compress},   {"beta_expand", &PropertyConfig::beta_expand},
      {"p_ref", &PropertyConfig::p_ref},             {"T_ref_rho", &PropertyConfig::T_ref_rho},
      {"mu_ref", &PropertyConfig::mu_ref},           {"b_visc", &PropertyConfig::b_visc},
      {"T_ref_mu", &PropertyConfig::T_ref_mu},
  };
  for (const auto& e : table)
    if (name == e.name) {
      p.*(e.field) = v;
      return;
    }
  throw ConfigError("config: unknown property 'prop." + name + "'");
}

SourceTerm make_source(SourceKind kind, std::vector<std::pair<int, double>> cells) {
  SourceTerm s;
  s.kind = kind;
  s.cells = std::move(cells);
  return s;
}

std::string describe(const char* what, const std::array<double, 3>& lo,
                     const std::array<double, 3>& hi) {
  std::ostringstream os;
  os << what << " box [" << lo[0] << ", " << hi[0] << "] x [" << lo[1] << ", " << hi[1] << "] x ["
     << lo[2] << ", " << hi[2] << "] m";
  return os.str();
}

void add_2d_sources(CaseSetup& c, bool heaters, double rate, double U, double T_inj,
                    double T_heater) {
  const auto& g = c.model.grid;
  const double lz = g.extents()[2];
  const double f = g.extents()[0] / kSide2d;  // positions are given for the 50 m square
  for (int side = 0; side < 2; ++side)
    for (const auto& row : kRows2d) {
      const double x0 = side == 0 ? 0.0 : (kSide2d - kBox2d) * f;
      const std::array<double, 3> lo{x0, row[0] * f, 0.0}, hi{x0 + kBox2d * f, row[1] * f, lz};
      SourceTerm s;
      const char* what;
      if (heaters) {
        s = make_source(SourceKind::heater, cells_in_box(g, lo, hi));
        s.U_heater = U;
        s.T_heater = T_heater;
        what = "heater";
      } else if (side == 0) {
        s = make_source(SourceKind::injector_const_rate, cells_in_box(g, lo, hi));
        s.rate = rate;
        s.T_inj = T_inj;
        what = "injector";
      } else {
        s = make_source(SourceKind::producer_const_rate, cells_in_box(g, lo, hi));
        s.rate = rate;
        what = "producer";
      }
      c.model.sources.push_back(std::move(s));
      c.source_notes.push_back(describe(what, lo, hi));
    }
}

void add_3d_sources(CaseSetup& c, double rate, double T_inj) {
  const auto& g = c.model.grid;
  const double L = g.extents()[0];
  const double layer = L / 20.0;  // one cell layer of the N = 20 mesh
  const double half = layer / 2.0;
  for (int top = 1; top >= 0; --top)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) {
        if ((i == 0 || i == 4) && (j == 0 || j == 4)) continue;  // 5x5 pattern minus corners
        const double cx = (0.1 + 0.2 * i) * L, cy = (0.1 + 0.2 * j) * g.extents()[1];
        const double z0 = top ? g.extents()[2] - layer : 0.0;
        const std::array<double, 3> lo{cx - half, cy - half, z0}, hi{cx + half, cy + half, z0 + layer};
        SourceTerm s = make_source(top ? SourceKind::injector_const_rate
                                       : SourceKind::producer_const_rate,
                                   cells_in_box(g, lo, hi));
        s.rate = rate;
        s.T_inj = T_inj;
        c.model.sources.push_back(std::move(s));
        c.source_notes.push_back(describe(top ? "injector" : "producer", lo, hi));
      }
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names = {"heater-2d",   "well-2d-iso",  "well-2d-aniso",
                                                 "well-3d",     "crosscoup-2d", "spe10-slice"};
  return names;
}

void synthetic_slice_fields(int nx, int ny, std::vector<double>& perm, std::vector<double>& phi) {
  // Smooth channel-like trend plus white noise in log10(K / mD). The
  // generator and the transform are fixed so the field is identical on
  // every platform.
  std::mt19937_64 rng(20191107);
  const int n = nx * ny;
  perm.resize(n);
  phi.resize(n);
  std::vector<double> logk(n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) / nx, y = (j + 0.5) / ny;
      const double channel = std::exp(-std::pow((x - 0.5 - 0.25 * std::sin(6.0 * y)) / 0.12, 2));
      const double trend = 0.8 * std::sin(9.0 * x + 2.0) * std::cos(7.0 * y);
      const double u1 = uniform01(rng), u2 = uniform01(rng);
      const double noise = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      logk[i + nx * j] = 0.5 + 2.5 * channel + trend + 0.5 * noise;
    }
  const auto [lo, hi] = std::minmax_element(logk.begin(), logk.end());
  const double lmin = *lo, lrange = *hi - *lo;
  for (int c = 0; c < n; ++c) {
    perm[c] = std::pow(10.0, logk[c]) * kMillidarcy;
    phi[c] = 0.05 + 0.3 * (logk[c] - lmin) / lrange;
  }
}

CaseSetup build_case(const CaseConfig& cfg) {
  const std::string& name = cfg.case_name;
  if (std::find(case_names().begin(), case_names().end(), name) == case_names().end()) {
    std::string known;
    for (const auto& n : case_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown case '" + name + "' (known: " + known + ")");
  }
  if (cfg.n < 1) throw ConfigError("config: n must be >= 1");

  const bool spe10 = name == "spe10-slice";
  const bool three_d = name == "well-3d";
  const int N = cfg.n;
  const double L = cfg.extent.value_or(three_d ? N * kCell3d : kSide2d);
  if (!(L > 0.0)) throw ConfigError("extent must be positive");
  StructuredGrid grid = spe10    ? StructuredGrid(cfg.slice_nx, cfg.slice_ny, 1, kSliceLx, kSliceLy, kSliceLz)
                        : three_d ? StructuredGrid(N, N, N, L, L, L)
                                  : StructuredGrid(N, N, 1, L, L, kThickness2d);
  CaseSetup c{ReservoirModel(std::move(grid)), {}, {}, {}, {}, {}};
  auto& m = c.model;
  const int ncell = m.num_cells();

  for (const auto& [k, v] : cfg.props) set_prop(m.props, k, v);
  m.props.coupling_factor = cfg.coupling_factor;

  const double s_o0 = cfg.s_o_initial.value_or(three_d ? 0.99 : 0.9);
  const double p0 = cfg.p_initial.value_or(kInitialPressure);
  const double T0 = cfg.T_initial.value_or(kInitialTemperature);
  const double T_inj = cfg.T_inj.value_or(kHotTemperature);
  const double T_heater = cfg.T_heater.value_or(kHotTemperature);
  const double U = cfg.U_heater.value_or(kDefaultHeaterU);
  m.gravity = cfg.gravity.value_or(three_d ? 9.81 : 0.0);

  double dt_days = 10.0;
  int steps = 2;
  if (name == "crosscoup-2d") dt_days = 2.0;
  if (three_d) {
    dt_days = s_o0 >= 1.0 ? 4.0 : 10.0;
    steps = 5;
  }
  dt_days = cfg.dt_days.value_or(dt_days);
  steps = cfg.steps.value_or(steps);
  c.schedule.dt = dt_days * kDay;
  c.schedule.steps = steps;
  c.schedule.heuristics = cfg.heuristics;
  m.dt = c.schedule.dt;

  if (spe10) {
    std::vector<double> perm, phi;
    if (!cfg.permeability_file.empty() || !cfg.porosity_file.empty()) {
      if (cfg.permeability_file.empty() || cfg.porosity_file.empty())
        throw ConfigError("spe10-slice: give both porosity_file and permeability_file");
      phi = load_field_file(cfg.porosity_file, cfg.slice_nx, cfg.slice_ny, 1, FieldUnit::none);
      perm = load_field_file(cfg.permeability_file, cfg.slice_nx, cfg.slice_ny, 1,
                             parse_field_unit(cfg.perm_unit));
    } else {
      synthetic_slice_fields(cfg.slice_nx, cfg.slice_ny, perm, phi);
    }
    for (auto& k : perm) k *= cfg.perm_multiplier;
    m.phi = phi;
    m.perm_x = m.perm_y = m.perm_z = perm;

    // One injector and one producer in the most permeable cell of the first
    // and last quarter of the slice (along y); heaters share the locations.
    const auto best_in = [&](int j0, int j1) {
      int best = m.grid.index(0, j0, 0);
      for (int j = j0; j < j1; ++j)
        for (int i = 0; i < m.grid.nx(); ++i)
          if (perm[m.grid.index(i, j, 0)] > perm[best]) best = m.grid.index(i, j, 0);
      return best;
    };
    const int ny = m.grid.ny();
    const int inj = best_in(0, std::max(1, ny / 4)), prod = best_in(ny - std::max(1, ny / 4), ny);
    const bool wells = cfg.sources == "well" || cfg.sources == "well+heater";
    const bool heaters = cfg.sources == "heater" || cfg.sources == "well+heater";
    if (!wells && !heaters)
      throw ConfigError("spe10-slice: sources must be well, heater or well+heater");
    const double rate = cfg.rate.value_or(3e-5);
    for (int cell : {inj, prod}) {
      const auto ijk = m.grid.ijk(cell);
      const std::string where =
          " cell (" + std::to_string(ijk[0]) + ", " + std::to_string(ijk[1]) + ")";
      if (wells) {
        SourceTerm s = make_source(cell == inj ? SourceKind::injector_const_rate
                                               : SourceKind::producer_const_rate,
                                   {{cell, 1.0}});
        s.rate = rate;
        s.T_inj = T_inj;
        m.sources.push_back(s);
        c.source_notes.push_back((cell == inj ? "injector" : "producer") + where);
      }
      if (heaters) {
        SourceTerm s = make_source(SourceKind::heater, {{cell, 1.0}});
        s.U_heater = U;
        s.T_heater = T_heater;
        m.sources.push_back(s);
        c.source_notes.push_back("heater" + where);
      }
    }
  } else if (three_d) {
    add_3d_sources(c, cfg.rate.value_or(1e-7), T_inj);
  } else {
    if (name == "well-2d-aniso") std::fill(m.perm_y.begin(), m.perm_y.end(), 3e-10);
    add_2d_sources(c, name == "heater-2d", cfg.rate.value_or(3e-7), U, T_inj, T_heater);
  }
  (void)ncell;

  m.scaling.enabled = cfg.scaling;
  m.scaling.T_ref = T0;
  m.scaling.c_ref = s_o0 * m.props.c_v_oil + (1.0 - s_o0) * m.props.c_v_water;
  m.validate();
  c.initial = State::uniform(m.num_cells(), p0, T0, s_o0);
  if (m.gravity > 0.0) {
    // Start from hydrostatic equilibrium of the mixture density, p0 at the top.
    const auto& g = m.grid;
    const double h = g.spacing()[2];
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        for (int k = g.nz() - 2; k >= 0; --k) {
          const int up = g.index(i, j, k + 1), c0 = g.index(i, j, k);
          const double rho_w = water_density(m.props, c.initial.p[up], T0).value;
          const double rho_o = oil_density(m.props, c.initial.p[up], T0).value;
          c.initial.p[c0] = c.initial.p[up] + (s_o0 * rho_o + (1.0 - s_o0) * rho_w) * m.gravity * h;
        }
  }

  c.linear.precond = parse_variant(cfg.precond);
  if (cfg.decouple) c.linear.precond.stage_one.decouple = parse_decoupling(*cfg.decouple);
  if (cfg.ilu_level) c.linear.precond.ilu_level = *cfg.ilu_level;
  c.linear.precond.order = parse_order(cfg.order);
  if (cfg.ordering == "field-wise")
    c.linear.ordering = Ordering::field_wise;
  else if (cfg.ordering == "cell-interleaved")
    c.linear.ordering = Ordering::cell_interleaved;
  else
    throw ConfigError("config: ordering must be field-wise or cell-interleaved");
  c.linear.subdomains = cfg.subdomains;
  try {
    c.linear.precond.validate(m.scaling.enabled);
    (void)slab_partition(m.grid, cfg.subdomains);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.newton.gmres.rtol = cfg.gmres_rtol;
  c.newton.gmres.max_iterations = cfg.gmres_max_iterations;
  c.newton.max_newton = cfg.max_newton;
  c.newton.validate();
  return c;
}

}  // namespace thermoflow::bench
