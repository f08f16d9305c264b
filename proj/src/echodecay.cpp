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

#include "spincoh/echodecay.hpp"

#include <cmath>
#include <stdexcept>

#include "spincoh/constants.hpp"
#include "spincoh/errors.hpp"

namespace spincoh::echodecay {

void MimsFitParams::validate() const {
  if (!(std::isfinite(amplitude) && amplitude > 0.0)) {
    throw std::domain_error("Mims amplitude must be > 0");
  }
  if (!(std::isfinite(T2e_s) && T2e_s > 0.0)) {
    throw std::domain_error("Mims T2e must be > 0");
  }
  if (!(x >= 1.0 && x <= 3.0)) {
    throw std::domain_error("Mims exponent x must lie in [1, 3]");
  }
}

void EchoTrace::validate() const {
  double prev = -1.0;
  for (const auto& p : points) {
    if (p.t12_s < 0.0 || p.t23_s < 0.0) {
      throw std::domain_error("echo trace delays must be >= 0");
    }
    if (!std::isfinite(p.amplitude)) {
      throw std::domain_error("echo trace amplitudes must be finite");
    }
    if (sequence == SequenceType::two_pulse && p.t23_s != 0.0) {
      throw std::domain_error("two-pulse trace must have t23 == 0");
    }
    const double d = swept_delay(p);
    if (d < prev) {
      throw std::domain_error("echo trace must be sorted by the swept delay");
    }
    prev = d;
  }
}

double EchoTrace::swept_delay(const EchoPoint& p) const {
  return sequence == SequenceType::two_pulse ? p.t12_s : p.t23_s;
}

double mims_amplitude(const MimsFitParams& p, double t12_s) {
  p.validate();
  if (t12_s < 0.0) throw std::domain_error("mims_amplitude: t12 must be >= 0");
  const double u = 2.0 * t12_s / p.T2e_s;
  return p.amplitude * std::exp(-std::pow(u, p.x));
}

EffectiveRates effective_rates(const relaxation::SDParams& p,
                               double temperature_K, double field_T) {
  p.validate();
  EffectiveRates r;
  const double site2_pol =
      relaxation::suppression_factor(site2_g, field_T, temperature_K);
  r.gamma0_Hz = site2_pol < site2_freezeout_threshold ? 0.0 : p.gamma0_Hz;
  double sd_scale = 1.0;
  if (p.scale_gamma_sd) {
    sd_scale =
        relaxation::suppression_factor(p.g_bath, field_T, temperature_K) /
        relaxation::suppression_factor(p.g_bath, p.ref_B_T, p.ref_T_K);
  }
  r.gamma_sd_Hz = p.gamma_sd_Hz * sd_scale;
  r.rate_per_s = relaxation::relaxation_rate(p, temperature_K, field_T);
  return r;
}

double effective_linewidth(const relaxation::SDParams& p, double temperature_K,
                           double field_T, double t12_s, double t23_s) {
  if (t12_s < 0.0 || t23_s < 0.0) {
    throw std::domain_error("effective_linewidth: delays must be >= 0");
  }
  const EffectiveRates r = effective_rates(p, temperature_K, field_T);
  const double rt23 = r.rate_per_s * t23_s;
  return r.gamma0_Hz +
         0.5 * r.gamma_sd_Hz * (r.rate_per_s * t12_s - std::expm1(-rt23));
}

double three_pulse_amplitude(const relaxation::SDParams& p, double amplitude0,
                             double t1e_s, double temperature_K,
                             double field_T, double t12_s, double t23_s) {
  if (!(t1e_s > 0.0)) {
    throw std::domain_error("three_pulse_amplitude: T1e must be > 0");
  }
  const double gamma_eff =
      effective_linewidth(p, temperature_K, field_T, t12_s, t23_s);
  return amplitude0 * std::exp(-t23_s / t1e_s) *
         std::exp(-2.0 * t12_s * constants::pi * gamma_eff);
}

double two_pulse_amplitude(const relaxation::SDParams& p, double amplitude0,
                           double temperature_K, double field_T,
                           double t12_s) {
  return three_pulse_amplitude(p, amplitude0,
                               std::numeric_limits<double>::infinity(),
                               temperature_K, field_T, t12_s, 0.0);
}

namespace {

// Decay exponent of the two-pulse model, E(t12) = a t12 + b t12^2.
struct TwoPulseExponent {
  double a = 0.0;
  double b = 0.0;
  double operator()(double t12) const { return t12 * (a + b * t12); }
};

TwoPulseExponent two_pulse_exponent(const relaxation::SDParams& p,
                                    double temperature_K, double field_T) {
  const EffectiveRates r = effective_rates(p, temperature_K, field_T);
  TwoPulseExponent e;
  e.a = 2.0 * constants::pi * r.gamma0_Hz;
  e.b = constants::pi * r.gamma_sd_Hz * r.rate_per_s;
  return e;
}

}  // namespace

CoherenceEstimate extract_T2e(const relaxation::SDParams& p,
                              double temperature_K, double field_T) {
  const TwoPulseExponent expo = two_pulse_exponent(p, temperature_K, field_T);

  CoherenceEstimate est;
  if (expo.a <= 0.0 && expo.b <= 0.0) {
    est.T2e_s = std::numeric_limits<double>::infinity();
    est.x_eff = std::numeric_limits<double>::quiet_NaN();
    est.finite = false;
    return est;
  }

  // Bracket the E(t) = 1 crossing, then bisect. E is strictly increasing.
  double hi = 1e-9;
  while (expo(hi) < 1.0) {
    hi *= 2.0;
    if (hi > 1e12) throw numeric_error("extract_T2e: failed to bracket");
  }
  double lo = 0.0;
  const double rel_tol = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (expo(mid) < 1.0 ? lo : hi) = mid;
    if ((hi - lo) <= rel_tol * hi) break;
  }
  const double t_star = 0.5 * (lo + hi);

  est.T2e_s = 2.0 * t_star;  // lifetime quoted on the echo time 2 t12
  const double h = 1e-3 * t_star;
  est.x_eff = (std::log(expo(t_star + h)) - std::log(expo(t_star - h))) /
              (std::log(t_star + h) - std::log(t_star - h));
  est.finite = true;
  return est;
}

}  // namespace spincoh::echodecay
