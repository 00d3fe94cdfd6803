#include "thermoflow/bench/config.hpp"

#include <charconv>
#include <fstream>

namespace thermoflow::bench {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects on/off, got '" + v + "'");
}

}  // namespace

void apply_setting(CaseConfig& c, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "case") c.case_name = v;
  else if (key == "n") c.n = to_int(key, v);
  else if (key == "extent") c.extent = to_double(key, v);
  else if (key == "precond") c.precond = v;
  else if (key == "decouple") c.decouple = v;
  else if (key == "ilu_level") c.ilu_level = to_int(key, v);
  else if (key == "order") c.order = v;
  else if (key == "scaling") c.scaling = to_bool(key, v);
  else if (key == "ordering") c.ordering = v;
  else if (key == "subdomains") c.subdomains = to_int(key, v);
  else if (key == "coupling_factor") c.coupling_factor = to_double(key, v);
  else if (key == "dt_days") c.dt_days = to_double(key, v);
  else if (key == "steps") c.steps = to_int(key, v);
  else if (key == "heuristics") c.heuristics = to_bool(key, v);
  else if (key == "s_o_initial") c.s_o_initial = to_double(key, v);
  else if (key == "p_initial") c.p_initial = to_double(key, v);
  else if (key == "T_initial") c.T_initial = to_double(key, v);
  else if (key == "gravity") c.gravity = to_double(key, v);
  else if (key == "rate") c.rate = to_double(key, v);
  else if (key == "U_heater") c.U_heater = to_double(key, v);
  else if (key == "T_inj") c.T_inj = to_double(key, v);
  else if (key == "T_heater") c.T_heater = to_double(key, v);
  else if (key == "porosity_file") c.porosity_file = v;
  else if (key == "permeability_file") c.permeability_file = v;
  else if (key == "perm_unit") c.perm_unit = v;
  else if (key == "perm_multiplier") c.perm_multiplier = to_double(key, v);
  else if (key == "sources") c.sources = v;
  else if (key == "slice_nx") c.slice_nx = to_int(key, v);
  else if (key == "slice_ny") c.slice_ny = to_int(key, v);
  else if (key == "gmres_rtol") c.gmres_rtol = to_double(key, v);
  else if (key == "gmres_max_iterations") c.gmres_max_iterations = to_int(key, v);
  else if (key == "max_newton") c.max_newton = to_int(key, v);
  else if (key == "out") c.out = v;
  else if (key.rfind("prop.", 0) == 0) c.props[key.substr(5)] = to_double(key, v);
  else throw ConfigError("config: unknown key '" + key + "'");
  c.echo.emplace_back(key, value);
}

CaseConfig parse_config(std::istream& in, const std::string& source_name) {
  CaseConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in, path);
}

}  // namespace thermoflow::bench
