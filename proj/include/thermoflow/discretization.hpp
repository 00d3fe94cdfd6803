#ifndef THERMOFLOW_DISCRETIZATION_HPP
#define THERMOFLOW_DISCRETIZATION_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thermoflow/grid.hpp"
#include "thermoflow/props.hpp"
#include "thermoflow/sparse/csr.hpp"
#include "thermoflow/sparse/ilu.hpp"

namespace thermoflow {

/// Primary unknowns per cell. The water saturation is always 1 - S_o.
struct State {
  std::vector<double> p;    // Pa
  std::vector<double> T;    // K
  std::vector<double> s_o;  // oil saturation

  static State uniform(int num_cells, double p, double T, double s_o);
  int num_cells() const { return static_cast<int>(p.size()); }
  void check_size(int num_cells) const;
};

enum class SourceKind { injector_const_rate, producer_const_rate, producer_bhp, heater };

/// A point source spread over a set of cells (discrete delta). Weights sum
/// to one over the set.
struct SourceTerm {
  SourceKind kind = SourceKind::heater;
  std::vector<std::pair<int, double>> cells;
  double rate = 0.0;        // m^3/s, const-rate kinds
  double p_bhp = 0.0;       // Pa, bhp producer
  double well_index = 0.0;  // m^3/(Pa s), bhp producer
  double T_inj = 373.15;    // K, injector
  double U_heater = 0.0;    // W/K
  double T_heater = 373.15; // K

  void validate(int num_cells) const;
};

/// Cells overlapping the box [lo, hi) with weights proportional to the
/// overlapped volume, normalised to one.
std::vector<std::pair<int, double>> cells_in_box(const StructuredGrid& grid,
                                                 const std::array<double, 3>& lo,
                                                 const std::array<double, 3>& hi);

struct EquationScaling {
  bool enabled = true;
  double T_ref = 288.706;  // K
  double c_ref = 2302.19;  // J/(K kg)
};

struct ReservoirModel {
  StructuredGrid grid;
  std::vector<double> phi;
  std::vector<double> perm_x, perm_y, perm_z;  // m^2
  PropertyConfig props;
  std::vector<SourceTerm> sources;
  double dt = 864000.0;  // s
  /// Magnitude of gravitational acceleration; the z axis points upward.
  double gravity = 0.0;
  EquationScaling scaling;

  explicit ReservoirModel(StructuredGrid g);
  int num_cells() const { return grid.num_cells(); }
  void validate() const;
};

/// Cell integrals of the water mass, energy and oil mass equations.
struct ResidualVector {
  std::vector<double> F_w, F_e, F_o;
};

/// Row-transformed residual: pressure equation c_vw F_w + c_vo F_o and the
/// optional reference scaling (T_ref F_p, F_e, c_ref T_ref F_o).
struct WeightedResidual {
  std::vector<double> F_p, F_e, F_o;
  double norm2() const;
};

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Side { plus, minus };

/// Upwind cell of a facet: plus when [p]/|[h]| - rho_avg g n_z >= 0.
Side upwind_side(const InteriorFacet& facet, std::span<const double> p, double rho_avg,
                 double gravity);

/// Discrete driving force [p]/|[h]| - rho_avg g n_z of a facet.
double driving_force(const InteriorFacet& facet, double p_plus, double p_minus, double rho_avg,
                     double gravity);

ResidualVector assemble_residual(const ReservoirModel& model, const State& state,
                                 const State& prev);

/// Accumulation part only, (M(state) - M(prev)) V / dt per equation.
ResidualVector assemble_accumulation(const ReservoirModel& model, const State& state,
                                     const State& prev);

/// 3x3 row transform applied to (w, e, o) rows, giving (p, e, o) rows.
std::array<std::array<double, 3>, 3> equation_weights(const ReservoirModel& model);

WeightedResidual apply_weighting_and_scaling(const ReservoirModel& model,
                                             const ResidualVector& r);

enum class Field : int { p = 0, T = 1, s = 2 };
enum class Ordering { field_wise, cell_interleaved };

/// Slab partition of cells along the longest axis (ties go to the fastest
/// varying axis, x before y before z). Returns the subdomain id of every cell.
std::vector<int> slab_partition(const StructuredGrid& grid, int subdomains);

/// Maps (field, cell) to a global row. Rows are grouped by subdomain, and
/// within a subdomain either all p, then all T, then all S_o (field-wise)
/// or (p, T, S_o) per cell (cell-interleaved).
class DofLayout {
 public:
  DofLayout(int num_cells, Ordering ordering, const std::vector<int>& cell_subdomain = {});

  int num_cells() const { return num_cells_; }
  int size() const { return 3 * num_cells_; }
  Ordering ordering() const { return ordering_; }
  int row(Field f, int cell) const { return rows_[static_cast<int>(f)][cell]; }
  /// Global rows of a field indexed by cell.
  const std::vector<int>& rows(Field f) const { return rows_[static_cast<int>(f)]; }
  /// Contiguous row ranges, one per subdomain.
  const RowPartition& partition() const { return partition_; }
  /// Row maps of several fields concatenated (e.g. p then T for the p-T block).
  std::vector<int> rows(std::initializer_list<Field> fields) const;

  std::vector<double> pack(const WeightedResidual& r) const;
  std::vector<double> pack(std::span<const double> p, std::span<const double> T,
                           std::span<const double> s) const;
  void unpack(std::span<const double> x, std::span<double> p, std::span<double> T,
              std::span<double> s) const;

 private:
  int num_cells_;
  Ordering ordering_;
  std::array<std::vector<int>, 3> rows_;
  RowPartition partition_;
};

/// Jacobian of the weighted, scaled residual with block index maps.
struct BlockSystem {
  CsrMatrix matrix;
  DofLayout layout;

  /// Sub-block A_xy with rows of field x and columns of field y, both in cell order.
  CsrMatrix block(Field row, Field col) const;
  /// Sub-matrix over the given row and column field groups.
  CsrMatrix block(std::initializer_list<Field> rows, std::initializer_list<Field> cols) const;
};

struct LinearizedSystem {
  BlockSystem system;
  /// Weighted, scaled residual in layout order.
  std::vector<double> residual;
  WeightedResidual weighted;
};

BlockSystem assemble_jacobian(const ReservoirModel& model, const State& state, const State& prev,
                              const DofLayout& layout);

LinearizedSystem linearize(const ReservoirModel& model, const State& state, const State& prev,
                           const DofLayout& layout);

/// Sparse approximation of the temperature Schur complement in cell order:
/// accumulation, upwinded advection of dT driven by the current pressure,
/// conduction, heater and producer diagonals.
CsrMatrix assemble_schur_approx(const ReservoirModel& model, const State& state);

/// Cell-wise volumetric phase rates of a source at the given state (positive
/// for both injection and production).
struct PhaseRates {
  double water = 0.0;
  double oil = 0.0;
};
PhaseRates source_phase_rates(const ReservoirModel& model, const SourceTerm& src, int cell,
                              double weight, const State& state);

}  // namespace thermoflow

#endif
