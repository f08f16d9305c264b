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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "spincoh/echodecay.hpp"

namespace spincoh::synth {

/// Standard-normal deviate via Box-Muller on mt19937_64 uniforms. Unlike
/// std::normal_distribution this is pinned to a fixed algorithm, so seeded
/// streams are reproducible across standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}
  double operator()();

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> linspace(double lo, double hi, int n);
std::vector<double> logspace(double lo, double hi, int n);

/// Two-pulse trace from a Mims shape, with multiplicative Gaussian noise of
/// relative size noise_frac (0 for noiseless).
echodecay::EchoTrace mims_trace(const echodecay::MimsFitParams& p,
                                std::span<const double> t12_s,
                                double noise_frac, std::uint64_t seed);

/// Two-pulse trace from the spectral-diffusion model at (T, B).
echodecay::EchoTrace two_pulse_trace(const relaxation::SDParams& p,
                                     double amplitude0, double temperature_K,
                                     double field_T,
                                     std::span<const double> t12_s,
                                     double noise_frac, std::uint64_t seed);

/// Three-pulse trace (t23 swept at fixed t12) from the spectral-diffusion
/// model; t1e_s is stored on the trace for downstream fits.
echodecay::EchoTrace three_pulse_trace(const relaxation::SDParams& p,
                                       double amplitude0, double t1e_s,
                                       double temperature_K, double field_T,
                                       double t12_s,
                                       std::span<const double> t23_s,
                                       double noise_frac, std::uint64_t seed);

}  // namespace spincoh::synth
