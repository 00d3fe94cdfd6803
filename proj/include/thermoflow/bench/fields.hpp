#ifndef THERMOFLOW_BENCH_FIELDS_HPP
#define THERMOFLOW_BENCH_FIELDS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace thermoflow::bench {

class FieldParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldUnit { none, m2, millidarcy };

inline constexpr double kMillidarcy = 9.869233e-16;  // m^2

FieldUnit parse_field_unit(const std::string& s);

/// Whitespace-separated values, x fastest, then y, then z, `components`
/// consecutive blocks of nx*ny*nz values (3 for per-axis permeability).
/// The file must hold exactly that many numbers. Values are converted to SI.
std::vector<double> load_field_file(const std::string& path, int nx, int ny, int nz,
                                    FieldUnit unit, int components = 1);

/// Writes values (SI) back in the unit given, one per line, round-trip exact.
void write_field_file(const std::string& path, const std::vector<double>& values, FieldUnit unit);

}  // namespace thermoflow::bench

#endif
