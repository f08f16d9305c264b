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

namespace spincoh::constants {

// CODATA 2018, truncated to 8 significant digits. h and k are SI-exact.
inline constexpr double mu_bohr_J_per_T = 9.2740101e-24;
inline constexpr double mu_bohr_over_h_Hz_per_T = 1.3996245e10;
inline constexpr double k_boltzmann_J_per_K = 1.380649e-23;
inline constexpr double h_planck_J_s = 6.62607015e-34;
inline constexpr double hbar_J_s = 1.0545718e-34;
inline constexpr double mu0_N_per_A2 = 1.2566371e-6;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace spincoh::constants
