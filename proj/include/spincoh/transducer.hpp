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

#include <array>
#include <vector>

namespace spincoh::transducer {

/// Configuration of the four-level gradient-echo conversion protocol.
///
/// An optical photon is absorbed on the broadened |1>-|4> line, dephases
/// under the gradient-induced optical inhomogeneity, is shelved onto the
/// |3>-|4> spin transition by a pi-pulse (where it dephases at the spin
/// inhomogeneity's rate), is brought back while the gradient is reversed,
/// rephases, and is finally shelved onto the spin transition again as a
/// collective state coupled to a microwave cavity with strength v.
struct ProtocolTimings {
  double t_dephase_s = 0.0;
  double t_shelf_s = 0.0;
  double t_rephase_s = 0.0;
};

struct ProtocolConfig {
  static constexpr int n_levels = 4;

  double opt_inhom_width_Hz = 0.0;   // gradient-broadened optical feature
  double spin_inhom_width_Hz = 0.0;  // gradient-broadened spin transition
  double coupling_v_rad_per_s = 0.0;
  double cavity_kappa_rad_per_s = 0.0;
  double T2e_s = 0.0;
  double x = 1.0;                    // stretch factor of the coherence decay
  double pulse_fidelity = 1.0;
  double gradient_reversal_error = 0.0;  // fractional mismatch, 0 = exact
  ProtocolTimings timings;

  void validate() const;
};

struct TrajectoryPoint {
  double t_s = 0.0;
  double coherence = 0.0;  // |sum_k w_k exp(i phi_k)|^2 times loss factors
  double norm = 0.0;       // retained excitation fraction (non-increasing)
  int step = 0;            // protocol step index (2, 4, 5)
};

struct ProtocolResult {
  std::vector<TrajectoryPoint> trajectory;
  double rephasing_peak_time_s = 0.0;  // elapsed time of full rephasing
  double coherence_at_coupling = 0.0;
  double eta_absorb = 1.0;
  double eta_coherence = 0.0;
  double eta_emit = 0.0;
  double eta_total = 0.0;
};

/// Execute the protocol phase bookkeeping over n_classes equal-weight
/// frequency classes and estimate the conversion efficiency. Throws
/// std::invalid_argument if the timings put the rephasing point outside the
/// configured rephase window.
ProtocolResult run_protocol(const ProtocolConfig& cfg, int n_classes = 501);

/// Input-output emission stage: the rephased collective spin amplitude S
/// exchanges with the cavity mode a,
///   dS/dt = -(1/T2e + i delta) S - i v a,
///   da/dt = -(kappa/2) a - i v S,
/// and the efficiency is the emitted fraction kappa * integral |a|^2 dt of
/// the initial unit excitation, times the supplied collective coherence.
struct EmissionResult {
  double efficiency = 0.0;
  double max_conservation_error = 0.0;
  // rows of (t, |S|^2, |a|^2, emitted fraction)
  std::vector<std::array<double, 4>> trace;
};

EmissionResult emission_efficiency_detail(const ProtocolConfig& cfg,
                                          double collective_coherence,
                                          double detuning_rad_per_s = 0.0,
                                          double t_end_s = 0.0);

double emission_efficiency(const ProtocolConfig& cfg,
                           double collective_coherence);

/// Scan kappa over [kappa_min, kappa_max] (angular, log- or linearly
/// spaced) and return (kappa, efficiency) pairs; the protocol's own kappa
/// is ignored during the scan.
std::vector<std::array<double, 2>> kappa_scan(const ProtocolConfig& cfg,
                                              double kappa_min_rad_per_s,
                                              double kappa_max_rad_per_s,
                                              int n_points, bool log_spacing);

double optimal_kappa(const ProtocolConfig& cfg, double kappa_min_rad_per_s,
                     double kappa_max_rad_per_s, int n_points,
                     bool log_spacing);

struct BandwidthReport {
  double photon_bandwidth_Hz = 0.0;
  double absorption_window_s = 0.0;
  double spin_to_opt_ratio = 0.0;
  bool rate_matched = false;  // spin dephasing matches the optical rate
};

BandwidthReport bandwidth_report(const ProtocolConfig& cfg);

}  // namespace spincoh::transducer
