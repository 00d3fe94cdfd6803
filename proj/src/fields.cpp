#include "thermoflow/bench/fields.hpp"

#include <cstdio>
#include <cstdlib>
#include <cerrno>
#include <fstream>
#include <sstream>

namespace thermoflow::bench {

FieldUnit parse_field_unit(const std::string& s) {
  if (s == "none") return FieldUnit::none;
  if (s == "m2") return FieldUnit::m2;
  if (s == "millidarcy" || s == "mD" || s == "md") return FieldUnit::millidarcy;
  throw std::invalid_argument("unknown field unit '" + s + "' (expected none, m2 or millidarcy)");
}

std::vector<double> load_field_file(const std::string& path, int nx, int ny, int nz,
                                    FieldUnit unit, int components) {
  if (nx < 1 || ny < 1 || nz < 1 || components < 1)
    throw std::invalid_argument("field file: dimensions must be >= 1");
  std::ifstream in(path);
  if (!in) throw FieldParseError("field file: cannot open " + path);
  const std::size_t expected = static_cast<std::size_t>(nx) * ny * nz * components;
  const double factor = unit == FieldUnit::millidarcy ? kMillidarcy : 1.0;
  std::vector<double> out;
  out.reserve(expected);
  std::string line, token;
  std::size_t line_no = 0, count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    while (ss >> token) {
      ++count;
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size() || errno == ERANGE)
        throw FieldParseError("field file " + path + ": token " + std::to_string(count) +
                              " ('" + token + "', line " + std::to_string(line_no) +
                              ") is not a number");
      if (count <= expected) out.push_back(v * factor);
    }
  }
  if (count != expected)
    throw FieldParseError("field file " + path + ": expected " + std::to_string(expected) +
                          " values, found " + std::to_string(count));
  return out;
}

void write_field_file(const std::string& path, const std::vector<double>& values, FieldUnit unit) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw FieldParseError("field file: cannot open " + path + " for writing");
  const double factor = unit == FieldUnit::millidarcy ? kMillidarcy : 1.0;
  for (double v : values) std::fprintf(f, "%.17g\n", v / factor);
  std::fclose(f);
}

}  // namespace thermoflow::bench
