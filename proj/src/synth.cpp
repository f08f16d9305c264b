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

#include "spincoh/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "spincoh/constants.hpp"

namespace spincoh::synth {

double GaussianSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 =
      (double(rng_() >> 11) + 1.0) * 0x1.0p-53;  // never exactly 0
  const double u2 = double(rng_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = constants::two_pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::domain_error("linspace: need n >= 2");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / (n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::domain_error("logspace: bad range");
  if (n < 2) throw std::domain_error("logspace: need n >= 2");
  std::vector<double> v(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    v[i] = std::exp(llo + (lhi - llo) * double(i) / (n - 1));
  }
  return v;
}

namespace {

double perturb(double value, double noise_frac, GaussianSampler& g) {
  return noise_frac == 0.0 ? value : value * (1.0 + noise_frac * g());
}

}  // namespace

echodecay::EchoTrace mims_trace(const echodecay::MimsFitParams& p,
                                std::span<const double> t12_s,
                                double noise_frac, std::uint64_t seed) {
  GaussianSampler g(seed);
  echodecay::EchoTrace tr;
  tr.sequence = echodecay::SequenceType::two_pulse;
  for (double t : t12_s) {
    tr.points.push_back(
        {t, 0.0, perturb(echodecay::mims_amplitude(p, t), noise_frac, g),
         0.0});
  }
  tr.validate();
  return tr;
}

echodecay::EchoTrace two_pulse_trace(const relaxation::SDParams& p,
                                     double amplitude0, double temperature_K,
                                     double field_T,
                                     std::span<const double> t12_s,
                                     double noise_frac, std::uint64_t seed) {
  GaussianSampler g(seed);
  echodecay::EchoTrace tr;
  tr.sequence = echodecay::SequenceType::two_pulse;
  tr.temperature_K = temperature_K;
  tr.field_T = field_T;
  for (double t : t12_s) {
    const double a =
        echodecay::two_pulse_amplitude(p, amplitude0, temperature_K, field_T, t);
    tr.points.push_back({t, 0.0, perturb(a, noise_frac, g), 0.0});
  }
  tr.validate();
  return tr;
}

echodecay::EchoTrace three_pulse_trace(const relaxation::SDParams& p,
                                       double amplitude0, double t1e_s,
                                       double temperature_K, double field_T,
                                       double t12_s,
                                       std::span<const double> t23_s,
                                       double noise_frac, std::uint64_t seed) {
  GaussianSampler g(seed);
  echodecay::EchoTrace tr;
  tr.sequence = echodecay::SequenceType::three_pulse;
  tr.temperature_K = temperature_K;
  tr.field_T = field_T;
  tr.t1e_s = t1e_s;
  for (double t : t23_s) {
    const double a = echodecay::three_pulse_amplitude(
        p, amplitude0, t1e_s, temperature_K, field_T, t12_s, t);
    tr.points.push_back({t12_s, t, perturb(a, noise_frac, g), 0.0});
  }
  tr.validate();
  return tr;
}

}  // namespace spincoh::synth
