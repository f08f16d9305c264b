/* Copyright 2026 The spincoh Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "spincoh/relaxation.hpp"

#include <cmath>
#include <stdexcept>

#include "spincoh/constants.hpp"

namespace spincoh::relaxation {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

void SDParams::validate() const {
  require(std::isfinite(gamma0_Hz) && gamma0_Hz >= 0.0, "gamma0 must be >= 0");
  require(std::isfinite(gamma_sd_Hz) && gamma_sd_Hz >= 0.0,
          "gamma_sd must be >= 0");
  require(std::isfinite(r_ff_per_s) && r_ff_per_s >= 0.0,
          "r_ff must be >= 0");
  require(std::isfinite(alpha_orbach_Hz) && alpha_orbach_Hz >= 0.0,
          "alpha_orbach must be >= 0");
  require(std::isfinite(delta_orbach_K) && delta_orbach_K > 0.0,
          "delta_orbach must be > 0");
  require(alpha_raman_per_s_K9 >= 0.0, "alpha_raman must be >= 0");
  require(alpha_direct_per_s_T4_K >= 0.0, "alpha_direct must be >= 0");
  require(std::isfinite(ref_T_K) && ref_T_K > 0.0, "ref_T must be > 0");
  require(std::isfinite(ref_B_T) && ref_B_T >= 0.0, "ref_B must be >= 0");
  require(std::isfinite(g_bath) && g_bath > 0.0, "g_bath must be > 0");
  require(suppression_factor(g_bath, ref_B_T, ref_T_K) > 1e-12,
          "reference conditions leave the bath fully polarized");
}

SDParams SDParams::er_yso_site1() {
  SDParams p;
  p.gamma0_Hz = 2.7e5;
  p.gamma_sd_Hz = 4.3e5;
  p.r_ff_per_s = 2.1e4;
  p.alpha_orbach_Hz = 50e10;
  p.delta_orbach_K = 40.0;
  p.ref_T_K = 1.9;
  p.ref_B_T = 8.7e-3;
  p.g_bath = 4.0;
  return p;
}

double orbach_rate(double alpha_Hz, double delta_K, double temperature_K) {
  require(temperature_K > 0.0, "orbach_rate: temperature must be > 0");
  require(delta_K > 0.0, "orbach_rate: delta must be > 0");
  require(std::isfinite(alpha_Hz) && alpha_Hz >= 0.0,
          "orbach_rate: alpha must be >= 0");
  const double z = delta_K / temperature_K;
  // alpha / (e^z - 1) = alpha e^-z / (1 - e^-z), stable for all z > 0
  return alpha_Hz * std::exp(-z) / (-std::expm1(-z));
}

double suppression_factor(double g, double field_T, double temperature_K) {
  require(temperature_K > 0.0, "suppression_factor: temperature must be > 0");
  require(std::isfinite(g) && g > 0.0, "suppression_factor: g must be > 0");
  require(std::isfinite(field_T) && field_T >= 0.0,
          "suppression_factor: field must be >= 0");
  const double x = g * constants::mu_bohr_J_per_T * field_T /
                   (2.0 * constants::k_boltzmann_J_per_K * temperature_K);
  const double sech = 2.0 * std::exp(-x) / (1.0 + std::exp(-2.0 * x));
  return sech * sech;
}

double relaxation_rate(const SDParams& p, double temperature_K,
                       double field_T) {
  p.validate();
  const double s = suppression_factor(p.g_bath, field_T, temperature_K);
  const double s_ref = suppression_factor(p.g_bath, p.ref_B_T, p.ref_T_K);
  const double t9 = std::pow(temperature_K, 9);
  const double b4 = std::pow(field_T, 4);
  return p.r_ff_per_s * (s / s_ref) +
         orbach_rate(p.alpha_orbach_Hz, p.delta_orbach_K, temperature_K) +
         p.alpha_raman_per_s_K9 * t9 + p.alpha_direct_per_s_T4_K * b4 *
         temperature_K;
}

double flip_flop_scaling(double g_a, double g_b) {
  require(g_a > 0.0 && g_b > 0.0, "flip_flop_scaling: g values must be > 0");
  const double r = g_b / g_a;
  return r * r * r * r;
}

double motional_narrowed_linewidth(double delta_nu_Hz, double r_fast_per_s) {
  require(r_fast_per_s > 0.0,
          "motional_narrowed_linewidth: rate must be > 0");
  require(std::isfinite(delta_nu_Hz) && delta_nu_Hz >= 0.0,
          "motional_narrowed_linewidth: linewidth must be >= 0");
  const double dw = constants::two_pi * delta_nu_Hz;
  return dw * dw / r_fast_per_s / constants::two_pi;
}

bool motional_narrowing_regime_ok(double delta_nu_Hz, double r_fast_per_s) {
  return r_fast_per_s > constants::two_pi * delta_nu_Hz;
}

double dipolar_sd_linewidth(double g_probe, double g_bath,
                            double bath_density_per_m3) {
  require(g_probe > 0.0 && g_bath > 0.0,
          "dipolar_sd_linewidth: g values must be > 0");
  require(std::isfinite(bath_density_per_m3) && bath_density_per_m3 >= 0.0,
          "dipolar_sd_linewidth: density must be >= 0");
  const double mub = constants::mu_bohr_J_per_T;
  return constants::mu0_N_per_A2 / (9.0 * std::sqrt(3.0)) * g_probe * g_bath *
         mub * mub * bath_density_per_m3 / constants::hbar_J_s;
}

double excited_population_rate(const ExcitedStateRates& rates,
                               const SDParams& spin_terms,
                               double temperature_K) {
  require(rates.pump_per_s >= 0.0 && rates.spont_per_s >= 0.0,
          "excited_population_rate: rates must be >= 0");
  const double orbach = orbach_rate(spin_terms.alpha_orbach_Hz,
                                    spin_terms.delta_orbach_K, temperature_K);
  const double raman =
      spin_terms.alpha_raman_per_s_K9 * std::pow(temperature_K, 9);
  return rates.pump_per_s + rates.spont_per_s + orbach + raman;
}

}  // namespace spincoh::relaxation
