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

#include <limits>
#include <vector>

#include "spincoh/relaxation.hpp"

namespace spincoh::echodecay {

/// Stretched-exponential echo-decay shape A exp[-(2 t12 / T2e)^x].
struct MimsFitParams {
  double amplitude = 1.0;
  double T2e_s = 1.0;
  double x = 1.0;

  void validate() const;  // amplitude > 0, T2e > 0, x in [1, 3]
};

enum class SequenceType { two_pulse, three_pulse };

struct EchoPoint {
  double t12_s = 0.0;
  double t23_s = 0.0;
  double amplitude = 0.0;
  double sigma = 0.0;  // optional per-point weight; 0 = unweighted
};

/// Measured or synthetic echo-amplitude dataset. For two-pulse data t12 is
/// swept (t23 == 0 per point); for three-pulse data t23 is swept at fixed
/// t12. Points must be sorted by the swept delay.
struct EchoTrace {
  SequenceType sequence = SequenceType::two_pulse;
  std::vector<EchoPoint> points;
  double temperature_K = 0.0;
  double field_T = 0.0;
  double t1e_s = std::numeric_limits<double>::infinity();

  void validate() const;
  double swept_delay(const EchoPoint& p) const;
};

double mims_amplitude(const MimsFitParams& p, double t12_s);

/// Linewidth/rate ingredients of the decay model at given conditions.
/// Two rescalings are applied relative to the stored parameter set:
///  - gamma_sd and r_ff carry the bath polarization factor (see SDParams);
///  - gamma0 is dropped entirely once the fast site-2 bath responsible for
///    it is frozen out, i.e. when suppression_factor(g = 14, B, T) falls
///    below 1e-3.
struct EffectiveRates {
  double gamma0_Hz = 0.0;
  double gamma_sd_Hz = 0.0;
  double rate_per_s = 0.0;
};

inline constexpr double site2_g = 14.0;
inline constexpr double site2_freezeout_threshold = 1e-3;

EffectiveRates effective_rates(const relaxation::SDParams& p,
                               double temperature_K, double field_T);

/// Gamma_eff(t12, t23) = Gamma0 + 1/2 Gamma_SD (R t12 + 1 - exp(-R t23)).
double effective_linewidth(const relaxation::SDParams& p, double temperature_K,
                           double field_T, double t12_s, double t23_s);

/// A(t12, t23) = A0 exp(-t23/T1e) exp(-2 t12 pi Gamma_eff(t12, t23)).
double three_pulse_amplitude(const relaxation::SDParams& p, double amplitude0,
                             double t1e_s, double temperature_K,
                             double field_T, double t12_s, double t23_s);

/// Three-pulse amplitude at t23 = 0; the exponent reduces to
/// -2 pi Gamma0 t12 - pi Gamma_SD R t12^2.
double two_pulse_amplitude(const relaxation::SDParams& p, double amplitude0,
                           double temperature_K, double field_T, double t12_s);

/// 1/e coherence lifetime of the modeled two-pulse decay.
///
/// Convention: T2e is measured on the echo time 2*t12, i.e. it is twice the
/// pulse delay at which the amplitude has dropped to A0/e. x_eff is the
/// log-log slope of the decay exponent at that point (1 for a pure
/// exponential, 2 for a purely quadratic exponent).
struct CoherenceEstimate {
  double T2e_s = 0.0;
  double x_eff = 0.0;
  bool finite = true;  // false when the model does not decay at all
};

CoherenceEstimate extract_T2e(const relaxation::SDParams& p,
                              double temperature_K, double field_T);

}  // namespace spincoh::echodecay
