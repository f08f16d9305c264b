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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "spincoh/constants.hpp"
#include "spincoh/transducer.hpp"

using namespace spincoh;
using constants::two_pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

transducer::ProtocolConfig base_config() {
  transducer::ProtocolConfig cfg;
  cfg.opt_inhom_width_Hz = 1e6;
  cfg.spin_inhom_width_Hz = 1e6;
  cfg.coupling_v_rad_per_s = two_pi * 34e6;
  cfg.cavity_kappa_rad_per_s = 4.0 * cfg.coupling_v_rad_per_s;
  cfg.T2e_s = 1.6e-6;
  cfg.x = 1.4;
  cfg.timings = {1e-6, 0.5e-6, 2e-6};
  return cfg;
}

}  // namespace

TEST_CASE("configuration validation") {
  auto cfg = base_config();
  CHECK_NOTHROW(cfg.validate());

  cfg.pulse_fidelity = 1.2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = base_config();
  cfg.opt_inhom_width_Hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  // rephasing after the end of the configured window
  cfg = base_config();
  cfg.timings = {1e-6, 0.0, 0.5e-6};
  CHECK_THROWS_AS(transducer::run_protocol(cfg, 51), std::invalid_argument);
}

TEST_CASE("negligible broadening leaves the collective state intact") {
  auto cfg = base_config();
  cfg.opt_inhom_width_Hz = 1e-6;
  cfg.spin_inhom_width_Hz = 1e-6;
  cfg.T2e_s = kInf;
  const auto res = transducer::run_protocol(cfg, 101);
  CHECK(res.coherence_at_coupling == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rephasing peak follows the analytic phase bookkeeping") {
  // rational widths and delays: exact cancellation time (in seconds)
  auto cfg = base_config();
  cfg.opt_inhom_width_Hz = 1024.0;
  cfg.spin_inhom_width_Hz = 512.0;
  cfg.T2e_s = kInf;
  cfg.pulse_fidelity = 0.9;
  cfg.timings = {1.0, 0.5, 2.0};

  const auto res = transducer::run_protocol(cfg, 3);
  // t_rephase = t_d + (W_spin/W_opt) t_s = 1 + 0.5 * 0.5
  CHECK(res.rephasing_peak_time_s == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(res.coherence_at_coupling ==
        doctest::Approx(0.9 * 0.9 * 0.9).epsilon(1e-12));

  // the sampled trajectory peaks at the same instant
  double best_t = -1.0, best_c = -1.0;
  for (const auto& pt : res.trajectory) {
    if (pt.coherence > best_c) {
      best_c = pt.coherence;
      best_t = pt.t_s;
    }
  }
  CHECK(best_t == doctest::Approx(2.75).epsilon(1e-9));
}

TEST_CASE("symmetric timings reproduce the echo-decay peak height") {
  auto cfg = base_config();
  cfg.timings = {0.5e-6, 0.0, 1e-6};
  cfg.pulse_fidelity = 0.95;
  const auto res = transducer::run_protocol(cfg, 301);

  // total free evolution is twice the dephasing leg
  const double tau = 2.0 * 0.5e-6;
  const double expected = std::exp(-std::pow(tau / cfg.T2e_s, cfg.x)) *
                          std::pow(0.95, 3);
  CHECK(res.coherence_at_coupling ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("trajectory norm never increases") {
  auto cfg = base_config();
  cfg.pulse_fidelity = 0.97;
  const auto res = transducer::run_protocol(cfg, 201);
  double prev = 1.0 + 1e-15;
  for (const auto& pt : res.trajectory) {
    CHECK(pt.norm <= prev + 1e-12);
    CHECK(pt.coherence <= pt.norm + 1e-12);
    prev = pt.norm;
  }
}

TEST_CASE("dead pulses kill the conversion") {
  auto cfg = base_config();
  cfg.pulse_fidelity = 0.0;
  const auto res = transducer::run_protocol(cfg, 101);
  CHECK(res.eta_total == 0.0);
}

TEST_CASE("emission requires coupling") {
  auto cfg = base_config();
  cfg.coupling_v_rad_per_s = 0.0;
  CHECK(transducer::emission_efficiency(cfg, 1.0) == 0.0);
}

TEST_CASE("lossless exchange conserves the two-mode norm") {
  auto cfg = base_config();
  cfg.T2e_s = kInf;
  cfg.cavity_kappa_rad_per_s = 0.0;
  cfg.coupling_v_rad_per_s = 1e6;

  const double t_end = 40.0 * two_pi / cfg.coupling_v_rad_per_s;
  const auto res =
      transducer::emission_efficiency_detail(cfg, 1.0, 0.0, t_end);
  CHECK(res.max_conservation_error < 1e-6);
  CHECK(res.efficiency == doctest::Approx(0.0).epsilon(1e-12));
  const auto& last = res.trace.back();
  CHECK(last[1] + last[2] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("excitation ledger stays balanced during emission") {
  const auto res = transducer::emission_efficiency_detail(base_config(), 1.0);
  CHECK(res.max_conservation_error < 1e-6);
  CHECK(res.efficiency > 0.9);
  CHECK(res.efficiency <= 1.0);
}

TEST_CASE("measured-coherence operating point converts above 99%") {
  const auto cfg = base_config();
  const double k_opt =
      transducer::optimal_kappa(cfg, two_pi * 0.1e6, two_pi * 1e9, 40, true);
  auto best = cfg;
  best.cavity_kappa_rad_per_s = k_opt;
  CHECK(transducer::emission_efficiency(best, 1.0) >= 0.99);
}

TEST_CASE("efficiency is monotone in the coherence lifetime") {
  auto cfg = base_config();
  double prev = -1.0;
  for (double t2 = 0.2e-6; t2 <= 26e-6; t2 *= 2.0) {
    cfg.T2e_s = t2;
    const double eta = transducer::emission_efficiency(cfg, 1.0);
    CHECK(eta >= prev);
    prev = eta;
  }
}

TEST_CASE("efficiency scales linearly with the supplied coherence") {
  const auto cfg = base_config();
  const double full = transducer::emission_efficiency(cfg, 1.0);
  CHECK(transducer::emission_efficiency(cfg, 0.5) ==
        doctest::Approx(0.5 * full).epsilon(1e-9));
}

TEST_CASE("bandwidth report") {
  auto cfg = base_config();
  const auto r = transducer::bandwidth_report(cfg);
  CHECK(r.photon_bandwidth_Hz == 1e6);
  CHECK(r.absorption_window_s == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(r.rate_matched);

  cfg.opt_inhom_width_Hz = 2e6;
  const auto r2 = transducer::bandwidth_report(cfg);
  CHECK(r2.absorption_window_s == doctest::Approx(0.5e-6).epsilon(1e-12));
  CHECK_FALSE(r2.rate_matched);
  CHECK(r2.spin_to_opt_ratio == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("loss-free protocol returns to the initial state at the peak") {
  auto cfg = base_config();
  cfg.T2e_s = kInf;
  cfg.pulse_fidelity = 1.0;
  const auto res = transducer::run_protocol(cfg, 301);
  CHECK(res.coherence_at_coupling == doctest::Approx(1.0).epsilon(1e-12));

  // before the peak the ensemble is genuinely dephased
  double min_c = 1.0;
  for (const auto& pt : res.trajectory) min_c = std::min(min_c, pt.coherence);
  CHECK(min_c < 0.1);
}
