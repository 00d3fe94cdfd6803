#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "thermoflow/props.hpp"

using namespace thermoflow;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// central difference of f at x with step h
double cd(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST(WaterViscosity, At100F) {
  const PropertyConfig c;
  const double T = (100.0 - 32.0) * 5.0 / 9.0 + 273.15;
  const double cp = 2.1850 / (-1.0 + 0.04012 * 100.0 + 5.1547e-6 * 1e4);
  const auto mu = water_viscosity(c, T);
  EXPECT_LT(rel(mu.value, cp * 1e-3), 1e-12);
  EXPECT_NEAR(mu.value, 7.132e-4, 5e-7);
  EXPECT_EQ(mu.d_dp, 0.0);
  EXPECT_LT(water_viscosity(c, 373.15).value, water_viscosity(c, 288.71).value);
  EXPECT_THROW(water_viscosity(c, 250.0), std::range_error);
  EXPECT_THROW(water_viscosity(c, 600.0), std::range_error);
}

TEST(WaterDensity, Examples) {
  const PropertyConfig c;
  EXPECT_DOUBLE_EQ(water_density(c, 10.2e6, 273.15).value, 999.83952);
  EXPECT_GT(water_density(c, 20e6, 293.15).value, water_density(c, 10.2e6, 293.15).value);

  // Kell polynomial written out term by term at 20 degC
  const double t = 20.0;
  const double num = 999.83952 + 16.955176 * t - 7.987e-3 * t * t - 46.170461e-6 * t * t * t +
                     105.56302e-9 * std::pow(t, 4) - 280.54353e-12 * std::pow(t, 5);
  const double want = num / (1.0 + 16.87985e-3 * t);
  EXPECT_LT(rel(water_density(c, 10.2e6, 293.15).value, want), 1e-13);
  EXPECT_THROW(water_density(c, 1e7, 270.0), std::range_error);
}

TEST(OilViscosity, Examples) {
  const PropertyConfig c;
  EXPECT_DOUBLE_EQ(oil_viscosity(c, c.T_ref_mu).value, c.mu_ref);
  const double ratio = oil_viscosity(c, 373.15).value / oil_viscosity(c, 288.71).value;
  EXPECT_NEAR(ratio, std::exp(9000.0 * (1 / 373.15 - 1 / 288.71)), 1e-12);
  EXPECT_LT(ratio, 2e-3);
  for (double T : {280.0, 320.0, 400.0}) EXPECT_LT(oil_viscosity(c, T).d_dT, 0.0);
}

TEST(OilDensity, Examples) {
  PropertyConfig c;
  const auto r = oil_density(c, c.p_ref, c.T_ref_rho);
  EXPECT_DOUBLE_EQ(r.value, c.rho_ref);
  EXPECT_DOUBLE_EQ(r.d_dT, -c.beta_expand * c.rho_ref);
  EXPECT_DOUBLE_EQ(r.d_dp, c.c_compress * c.rho_ref);
  c.coupling_factor = 2.0;
  const auto r2 = oil_density(c, c.p_ref, c.T_ref_rho);
  EXPECT_DOUBLE_EQ(r2.d_dT / r2.value, 2.0 * r.d_dT / r.value);
  EXPECT_DOUBLE_EQ(r2.d_dp / r2.value, 2.0 * r.d_dp / r.value);
}

TEST(RelPerm, Linear) {
  auto k = rel_perm(0.9);
  EXPECT_DOUBLE_EQ(k.k_ro, 0.9);
  EXPECT_NEAR(k.k_rw, 0.1, 1e-16);
  EXPECT_FALSE(k.clamped);
  k = rel_perm(1.0);
  EXPECT_EQ(k.k_ro, 1.0);
  EXPECT_EQ(k.k_rw, 0.0);
  k = rel_perm(0.0);
  EXPECT_EQ(k.k_ro, 0.0);
  EXPECT_EQ(k.k_rw, 1.0);
  k = rel_perm(1.02);
  EXPECT_TRUE(k.clamped);
  EXPECT_EQ(k.k_ro, 1.0);
  k = rel_perm(-0.01);
  EXPECT_TRUE(k.clamped);
  EXPECT_EQ(k.k_rw, 1.0);
}

TEST(RelPerm, SumsToOne) {
  for (int i = 0; i <= 100; ++i) {
    const auto k = rel_perm(i / 100.0);
    EXPECT_EQ(k.k_ro + k.k_rw, 1.0);
  }
}

TEST(ThermalConductivity, Examples) {
  const PropertyConfig c;
  EXPECT_DOUBLE_EQ(thermal_conductivity(c, 0.0, 0.3), 1.7295772056);
  EXPECT_NEAR(thermal_conductivity(c, 0.2, 1.0), 0.8 * 1.7295772056 + 0.2 * 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(thermal_conductivity(c, 1.0, 0.0), 0.6005638);
  EXPECT_THROW(thermal_conductivity(c, 1.2, 0.5), std::invalid_argument);
  EXPECT_THROW(thermal_conductivity(c, 0.2, -0.5), std::invalid_argument);
}

TEST(PropertyConfig, Validate) {
  PropertyConfig c;
  EXPECT_NO_THROW(c.validate());
  c.coupling_factor = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.c_v_rock = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Props, DerivativesMatchFiniteDifferences) {
  PropertyConfig c;
  c.coupling_factor = 3.0;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> up(1e7, 1e8), uT(288.0, 374.0);
  for (int t = 0; t < 100; ++t) {
    const double p = up(rng), T = uT(rng);
    const double hp = 1e-3 * p, hT = 1e-3;
    using F = std::function<double(double)>;
    const auto check = [&](double an, const F& f, double x, double h) {
      const double fd = cd(f, x, h);
      EXPECT_LT(std::abs(an - fd), 1e-6 * std::max(std::abs(fd), 1e-30)) << "p=" << p << " T=" << T;
    };
    check(water_density(c, p, T).d_dp, [&](double x) { return water_density(c, x, T).value; }, p, hp);
    check(water_density(c, p, T).d_dT, [&](double x) { return water_density(c, p, x).value; }, T, hT);
    check(oil_density(c, p, T).d_dp, [&](double x) { return oil_density(c, x, T).value; }, p, hp);
    check(oil_density(c, p, T).d_dT, [&](double x) { return oil_density(c, p, x).value; }, T, hT);
    check(water_viscosity(c, T).d_dT, [&](double x) { return water_viscosity(c, x).value; }, T, hT);
    check(oil_viscosity(c, T).d_dT, [&](double x) { return oil_viscosity(c, x).value; }, T, hT);
  }
}

TEST(Props, Monotonicity) {
  const PropertyConfig c;
  for (double T = 288.0; T < 374.0; T += 1.0) {
    EXPECT_LT(water_density(c, 2e7, T + 1).value, water_density(c, 2e7, T).value);
    EXPECT_LT(water_viscosity(c, T + 1).value, water_viscosity(c, T).value);
    EXPECT_LT(oil_viscosity(c, T + 1).value, oil_viscosity(c, T).value);
  }
  for (double p = 1e7; p < 1e8; p += 5e6)
    EXPECT_GT(water_density(c, p + 5e6, 330).value, water_density(c, p, 330).value);
}
