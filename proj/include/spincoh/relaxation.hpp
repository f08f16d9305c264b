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

#pragma once

namespace spincoh::relaxation {

/// Spectral-diffusion parameter bundle for one probe/bath configuration.
///
/// gamma0 and gamma_sd are ordinary-frequency linewidths (Hz); r_ff is the
/// bath flip-flop rate at the reference conditions (ref_T, ref_B). The
/// flip-flop rate is rescaled away from the reference point by the bath
/// polarization factor sech^2(g mu_B B / 2kT); when scale_gamma_sd is set
/// (the default) the same factor rescales gamma_sd, since both quantities
/// are products of the same bath dynamics.
struct SDParams {
  double gamma0_Hz = 0.0;        // residual homogeneous linewidth
  double gamma_sd_Hz = 0.0;      // spectral-diffusion linewidth at reference
  double r_ff_per_s = 0.0;       // bath flip-flop rate at reference
  double alpha_orbach_Hz = 0.0;  // Orbach coupling strength
  double delta_orbach_K = 1.0;   // crystal-field level energy, in Kelvin
  double alpha_raman_per_s_K9 = 0.0;
  double alpha_direct_per_s_T4_K = 0.0;
  double ref_T_K = 1.9;
  double ref_B_T = 8.7e-3;
  double g_bath = 4.0;
  bool scale_gamma_sd = true;

  void validate() const;

  /// Fitted dataset for 50 ppm Er:Y2SiO5 site-1 excited-state echoes probed
  /// against the site-1 ground-state spin bath at 8.7 mT.
  static SDParams er_yso_site1();
};

/// Two-phonon resonant rate through a real level at energy delta_K:
/// alpha / (exp(delta/T) - 1). Stable for delta/T up to overflow range.
double orbach_rate(double alpha_Hz, double delta_K, double temperature_K);

/// Bath polarization suppression sech^2(g mu_B B / 2 k T), in (0, 1].
/// Underflows to 0 for extreme polarization (argument beyond ~350).
double suppression_factor(double g, double field_T, double temperature_K);

/// Bath relaxation rate
///   R = r_ff * S(B,T)/S(ref) + orbach + alpha_raman T^9 + alpha_direct B^4 T
/// with S the suppression factor evaluated at g_bath.
double relaxation_rate(const SDParams& p, double temperature_K,
                       double field_T);

/// Flip-flop rate ratio between baths of g factor g_a and g_b: (g_b/g_a)^4.
double flip_flop_scaling(double g_a, double g_b);

/// Motionally narrowed linewidth Gamma = (2 pi dnu)^2 / R / (2 pi), in Hz.
/// Meaningful only in the fast-fluctuation regime R >> 2 pi dnu; see
/// motional_narrowing_regime_ok.
double motional_narrowed_linewidth(double delta_nu_Hz, double r_fast_per_s);
bool motional_narrowing_regime_ok(double delta_nu_Hz, double r_fast_per_s);

/// Dilute dipolar spectral-diffusion linewidth (FWHM, Hz):
///   Gamma_SD = mu0 g_probe g_bath mu_B^2 n / (9 sqrt(3) hbar).
/// Prefactor convention: statistical-theory Lorentzian FWHM with the 2 pi
/// absorbed, so the result is an ordinary-frequency linewidth directly
/// comparable to gamma_sd. Linear in n and in each g.
double dipolar_sd_linewidth(double g_probe, double g_bath,
                            double bath_density_per_m3);

/// Yttrium site densities in Y2SiO5 (two crystallographic sites, equal
/// abundance). A dopant fraction c substituting at one site gives a bath
/// density c * yso_y_site_density_per_m3.
inline constexpr double yso_y_density_per_m3 = 1.86e28;
inline constexpr double yso_y_site_density_per_m3 = 0.93e28;

/// Excited-state population decay contributions. pump is the stimulated
/// rate from continuous optical excitation, spont the spontaneous emission
/// rate; two-phonon terms come from the bundle's Orbach/Raman coefficients.
struct ExcitedStateRates {
  double pump_per_s = 0.0;
  double spont_per_s = 0.0;
};

/// 1/T1e = pump + spont + orbach(spin_terms) + raman(spin_terms).
double excited_population_rate(const ExcitedStateRates& rates,
                               const SDParams& spin_terms,
                               double temperature_K);

// CW-excitation defaults: an 8 ms radiative lifetime plus stimulated
// emission from the always-on laser, plateauing T1e at 1.2 ms.
inline constexpr double default_spont_rate_per_s = 125.0;
inline constexpr double default_pump_rate_per_s = 1.0 / 1.2e-3 - 125.0;

}  // namespace spincoh::relaxation
