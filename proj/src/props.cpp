#include "thermoflow/props.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace thermoflow {

namespace {

constexpr double kKelvinOffset = 273.15;
constexpr double kCentipoise = 1e-3;  // Pa s

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("property config: ") + name + " must be > 0");
}

}  // namespace

void PropertyConfig::validate() const {
  require_positive(c_v_oil, "c_v_oil");
  require_positive(c_v_water, "c_v_water");
  require_positive(c_v_rock, "c_v_rock");
  require_positive(rho_rock, "rho_rock");
  require_positive(k_T_oil, "k_T_oil");
  require_positive(k_T_water, "k_T_water");
  require_positive(k_T_rock, "k_T_rock");
  require_positive(rho_ref, "rho_ref");
  require_positive(mu_ref, "mu_ref");
  require_positive(T_ref_mu, "T_ref_mu");
  if (!(coupling_factor >= 1.0))
    throw std::invalid_argument("property config: coupling_factor must be >= 1");
}

PropEval water_viscosity(const PropertyConfig& cfg, double T) {
  if (!(T >= kWaterViscosityTmin && T <= kWaterViscosityTmax))
    throw std::range_error("water_viscosity: temperature " + std::to_string(T) +
                           " K outside validated range");
  const double tf = (T - kKelvinOffset) * 1.8 + 32.0;
  const double denom = -1.0 + cfg.visc_B * tf + cfg.visc_C * tf * tf;
  if (!(denom > 0.0)) throw std::range_error("water_viscosity: non-positive denominator");
  const double mu = cfg.visc_A / denom * kCentipoise;
  const double ddenom_dT = (cfg.visc_B + 2.0 * cfg.visc_C * tf) * 1.8;
  return {mu, 0.0, -mu * ddenom_dT / denom};
}

PropEval water_density(const PropertyConfig& cfg, double p, double T) {
  const double tc = T - kKelvinOffset;
  if (!(tc >= 0.0))
    throw std::range_error("water_density: temperature " + std::to_string(T) + " K below 0 degC");
  const auto& E = cfg.E;
  // Horner for the quintic numerator and its derivative.
  double num = E[5];
  double dnum = 0.0;
  for (int i = 4; i >= 0; --i) {
    dnum = dnum * tc + num;
    num = num * tc + E[i];
  }
  const double den = 1.0 + E[6] * tc;
  const double ratio = num / den;
  const double dratio = (dnum * den - num * E[6]) / (den * den);
  const double ex = std::exp(cfg.C_w * (p * 1e-6 - E[7]));
  const double rho = ratio * ex;
  return {rho, rho * cfg.C_w * 1e-6, dratio * ex};
}

PropEval oil_viscosity(const PropertyConfig& cfg, double T) {
  if (!(T > 0.0)) throw std::range_error("oil_viscosity: non-positive temperature");
  const double mu = cfg.mu_ref * std::exp(cfg.b_visc * (1.0 / T - 1.0 / cfg.T_ref_mu));
  return {mu, 0.0, -mu * cfg.b_visc / (T * T)};
}

PropEval oil_density(const PropertyConfig& cfg, double p, double T) {
  const double c = cfg.coupling_factor * cfg.c_compress;
  const double beta = cfg.coupling_factor * cfg.beta_expand;
  const double rho = cfg.rho_ref * std::exp(c * (p - cfg.p_ref) - beta * (T - cfg.T_ref_rho));
  return {rho, c * rho, -beta * rho};
}

double clamp_saturation(double s_o) { return std::clamp(s_o, 0.0, 1.0); }

RelPerm rel_perm(double s_o) {
  const double s = clamp_saturation(s_o);
  return {s, 1.0 - s, s != s_o};
}

double thermal_conductivity(const PropertyConfig& cfg, double phi, double s_o) {
  if (!(phi >= 0.0 && phi <= 1.0))
    throw std::invalid_argument("thermal_conductivity: porosity outside [0, 1]");
  if (!(s_o >= 0.0 && s_o <= 1.0))
    throw std::invalid_argument("thermal_conductivity: saturation outside [0, 1]");
  return (1.0 - phi) * cfg.k_T_rock + phi * (s_o * cfg.k_T_oil + (1.0 - s_o) * cfg.k_T_water);
}

}  // namespace thermoflow
