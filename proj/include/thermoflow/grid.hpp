#ifndef THERMOFLOW_GRID_HPP
#define THERMOFLOW_GRID_HPP

#include <array>
#include <span>
#include <vector>

namespace thermoflow {

enum class Axis : int { x = 0, y = 1, z = 2 };

/// A facet shared by two cells. The unit normal points from cell_plus to
/// cell_minus, i.e. along the positive direction of `axis`, and jumps are
/// taken as [v] = v(cell_plus) - v(cell_minus).
struct InteriorFacet {
  int cell_plus = 0;
  int cell_minus = 0;
  double area = 0.0;
  double center_distance = 0.0;
  Axis axis = Axis::x;
};

/// Uniform rectilinear cell-centred grid. Only interior facets are stored:
/// boundary facets carry no flux under homogeneous Neumann conditions.
///
/// Cells are numbered x-fastest, then y, then z. Facets are stored x-axis
/// facets first, then y, then z, each block in (k, j, i) lexicographic order.
class StructuredGrid {
 public:
  StructuredGrid(int nx, int ny, int nz, double lx, double ly, double lz);

  int nx() const { return dims_[0]; }
  int ny() const { return dims_[1]; }
  int nz() const { return dims_[2]; }
  const std::array<int, 3>& dims() const { return dims_; }
  const std::array<double, 3>& extents() const { return extents_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  int num_cells() const { return dims_[0] * dims_[1] * dims_[2]; }
  double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }
  bool is_2d() const { return dims_[2] == 1; }

  int index(int i, int j, int k) const { return i + dims_[0] * (j + dims_[1] * k); }
  std::array<int, 3> ijk(int cell) const;
  std::array<double, 3> cell_center(int cell) const;

  std::span<const InteriorFacet> facets() const { return facets_; }
  int num_facets() const { return static_cast<int>(facets_.size()); }

  /// Expected number of interior facets for the given counts.
  static long expected_facet_count(int nx, int ny, int nz);

 private:
  std::array<int, 3> dims_;
  std::array<double, 3> extents_;
  std::array<double, 3> spacing_;
  std::vector<InteriorFacet> facets_;
};

inline StructuredGrid build_grid(int nx, int ny, int nz, double lx, double ly, double lz) {
  return StructuredGrid(nx, ny, nz, lx, ly, lz);
}

/// 2ab/(a+b), zero when both arguments vanish.
double harmonic_average(double a, double b);

}  // namespace thermoflow

#endif
