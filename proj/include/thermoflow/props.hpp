#ifndef THERMOFLOW_PROPS_HPP
#define THERMOFLOW_PROPS_HPP

#include <array>

namespace thermoflow {

/// A property value with its partial derivatives in pressure (per Pa) and
/// temperature (per K).
struct PropEval {
  double value = 0.0;
  double d_dp = 0.0;
  double d_dT = 0.0;
};

/// Rock and fluid parameters. Everything is SI except the correlation
/// coefficients, which keep the units of their published correlations
/// (degF and cp for water viscosity, degC and MPa for water density).
struct PropertyConfig {
  // specific heats, J/(K kg)
  double c_v_oil = 2093.4;
  double c_v_water = 4181.3;
  double c_v_rock = 920.0;
  double rho_rock = 2650.0;
  // conductivities, W/(m K)
  double k_T_oil = 0.15;
  double k_T_water = 0.6005638;
  double k_T_rock = 1.7295772056;

  // water viscosity: mu[cp] = A / (-1 + B T_F + C T_F^2)
  double visc_A = 2.1850;
  double visc_B = 0.04012;
  double visc_C = 5.1547e-6;

  // water density: rational polynomial in T_C times exp(C_w (p_MPa - E7))
  std::array<double, 8> E = {999.83952,     16.955176,    -7.987e-3,  -46.170461e-6,
                             105.56302e-9,  -280.54353e-12, 16.87985e-3, 10.2};
  double C_w = 3.98854e-4;

  // oil density: rho_ref exp(f c (p - p_ref) - f beta (T - T_ref))
  double rho_ref = 999.83952;
  double c_compress = 5e-10;
  double beta_expand = 2.8e-4;
  double p_ref = 101325.0;
  double T_ref_rho = 288.706;

  // oil viscosity: mu_ref exp(b (1/T - 1/T_ref))
  double mu_ref = 1.0;
  double b_visc = 9000.0;
  double T_ref_mu = 288.706;

  /// Multiplier applied to both c_compress and beta_expand.
  double coupling_factor = 1.0;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

/// Validated temperature range of the water viscosity correlation, K.
inline constexpr double kWaterViscosityTmin = 273.0;
inline constexpr double kWaterViscosityTmax = 500.0;

PropEval water_viscosity(const PropertyConfig& cfg, double T);
PropEval water_density(const PropertyConfig& cfg, double p, double T);
PropEval oil_viscosity(const PropertyConfig& cfg, double T);
PropEval oil_density(const PropertyConfig& cfg, double p, double T);

struct RelPerm {
  double k_ro = 0.0;
  double k_rw = 0.0;
  /// Set when the input saturation was outside [0, 1] and got clamped.
  bool clamped = false;
};

/// Linear relative permeabilities, k_ro = S_o and k_rw = 1 - S_o.
RelPerm rel_perm(double s_o);

/// (1 - phi) k_T,rock + phi (S_o k_T,oil + (1 - S_o) k_T,water)
double thermal_conductivity(const PropertyConfig& cfg, double phi, double s_o);

double clamp_saturation(double s_o);

}  // namespace thermoflow

#endif
