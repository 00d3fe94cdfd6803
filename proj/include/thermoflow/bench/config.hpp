#ifndef THERMOFLOW_BENCH_CONFIG_HPP
#define THERMOFLOW_BENCH_CONFIG_HPP

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermoflow::bench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to run one experiment. Unset optionals take the case
/// default from the catalog.
struct CaseConfig {
  std::string case_name = "heater-2d";
  int n = 20;  // cells per side of the base mesh
  std::optional<double> extent;  // side length in m of the square/cube cases

  std::string precond = "cpr-amg";
  std::optional<std::string> decouple;  // none | qi | ti
  std::optional<int> ilu_level;
  std::string order = "restricted-first";
  bool scaling = true;
  std::string ordering = "field-wise";
  int subdomains = 1;
  double coupling_factor = 1.0;

  std::optional<double> dt_days;
  std::optional<int> steps;
  bool heuristics = false;

  std::optional<double> s_o_initial;
  std::optional<double> p_initial;
  std::optional<double> T_initial;
  std::optional<double> gravity;
  std::optional<double> rate;       // m^3/s per well
  std::optional<double> U_heater;   // W/K per heater
  std::optional<double> T_inj;
  std::optional<double> T_heater;

  // spe10-slice
  std::string porosity_file;
  std::string permeability_file;
  std::string perm_unit = "millidarcy";
  double perm_multiplier = 1.0;
  std::string sources = "well";  // well | heater | well+heater
  int slice_nx = 60, slice_ny = 120;

  double gmres_rtol = 1e-8;
  int gmres_max_iterations = 200;
  int max_newton = 20;

  /// Property overrides, `prop.<name> = value`.
  std::map<std::string, double> props;

  std::string out;  // output prefix: <out>.csv and <out>.json

  /// Every key = value pair as read, for the JSON echo.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Applies one setting; throws ConfigError for unknown keys or bad values.
void apply_setting(CaseConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines, `#` starts a comment, blank lines ignored.
CaseConfig parse_config(std::istream& in, const std::string& source_name = "<config>");
CaseConfig load_config(const std::string& path);

}  // namespace thermoflow::bench

#endif
