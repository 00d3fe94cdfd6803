#include "thermoflow/grid.hpp"

#include <stdexcept>
#include <string>

namespace thermoflow {

StructuredGrid::StructuredGrid(int nx, int ny, int nz, double lx, double ly, double lz)
    : dims_{nx, ny, nz}, extents_{lx, ly, lz} {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] < 1)
      throw std::invalid_argument("grid: cell count along axis " + std::to_string(a) +
                                  " must be >= 1");
    if (!(extents_[a] > 0.0))
      throw std::invalid_argument("grid: extent along axis " + std::to_string(a) +
                                  " must be > 0");
    spacing_[a] = extents_[a] / dims_[a];
  }

  facets_.reserve(static_cast<std::size_t>(expected_facet_count(nx, ny, nz)));
  const double hx = spacing_[0], hy = spacing_[1], hz = spacing_[2];
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i)
        facets_.push_back({index(i, j, k), index(i + 1, j, k), hy * hz, hx, Axis::x});
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i < nx; ++i)
        facets_.push_back({index(i, j, k), index(i, j + 1, k), hx * hz, hy, Axis::y});
  for (int k = 0; k + 1 < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        facets_.push_back({index(i, j, k), index(i, j, k + 1), hx * hy, hz, Axis::z});
}

std::array<int, 3> StructuredGrid::ijk(int cell) const {
  const int i = cell % dims_[0];
  const int j = (cell / dims_[0]) % dims_[1];
  const int k = cell / (dims_[0] * dims_[1]);
  return {i, j, k};
}

std::array<double, 3> StructuredGrid::cell_center(int cell) const {
  const auto c = ijk(cell);
  return {(c[0] + 0.5) * spacing_[0], (c[1] + 0.5) * spacing_[1], (c[2] + 0.5) * spacing_[2]};
}

long StructuredGrid::expected_facet_count(int nx, int ny, int nz) {
  return static_cast<long>(nx - 1) * ny * nz + static_cast<long>(nx) * (ny - 1) * nz +
         static_cast<long>(nx) * ny * (nz - 1);
}

double harmonic_average(double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("harmonic_average: negative argument");
  const double s = a + b;
  if (s == 0.0) return 0.0;
  return 2.0 * a * b / s;
}

}  // namespace thermoflow
