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

#include "spincoh/transducer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "spincoh/constants.hpp"
#include "spincoh/errors.hpp"

namespace spincoh::transducer {

namespace {

using constants::two_pi;

// Mims-shaped amplitude retention after free-evolution time tau.
double coherence_retention(const ProtocolConfig& cfg, double tau_s) {
  if (std::isinf(cfg.T2e_s)) return 1.0;
  return std::exp(-std::pow(tau_s / cfg.T2e_s, cfg.x));
}

struct EmissionOde {
  double gamma, kappa, v, delta;

  // state: [Re S, Im S, Re a, Im a, decayed, emitted]
  void operator()(const std::array<double, 6>& s, std::array<double, 6>& ds,
                  double) const {
    ds[0] = -gamma * s[0] + delta * s[1] + v * s[3];
    ds[1] = -gamma * s[1] - delta * s[0] - v * s[2];
    ds[2] = -0.5 * kappa * s[2] + v * s[1];
    ds[3] = -0.5 * kappa * s[3] - v * s[0];
    ds[4] = 2.0 * gamma * (s[0] * s[0] + s[1] * s[1]);
    ds[5] = kappa * (s[2] * s[2] + s[3] * s[3]);
  }
};

}  // namespace

void ProtocolConfig::validate() const {
  if (!(opt_inhom_width_Hz > 0.0) || !(spin_inhom_width_Hz > 0.0)) {
    throw std::invalid_argument("inhomogeneous widths must be > 0");
  }
  if (!(coupling_v_rad_per_s >= 0.0) || !(cavity_kappa_rad_per_s >= 0.0)) {
    throw std::invalid_argument("coupling and kappa must be >= 0");
  }
  if (!(T2e_s > 0.0)) throw std::invalid_argument("T2e must be > 0");
  if (!(x >= 1.0 && x <= 3.0)) {
    throw std::invalid_argument("stretch factor x must lie in [1, 3]");
  }
  if (!(pulse_fidelity >= 0.0 && pulse_fidelity <= 1.0)) {
    throw std::invalid_argument("pulse_fidelity must lie in [0, 1]");
  }
  if (!(gradient_reversal_error >= 0.0 && gradient_reversal_error < 1.0)) {
    throw std::invalid_argument("gradient_reversal_error must lie in [0, 1)");
  }
  if (timings.t_dephase_s < 0.0 || timings.t_shelf_s < 0.0 ||
      timings.t_rephase_s < 0.0) {
    throw std::invalid_argument("timings must be >= 0");
  }
}

ProtocolResult run_protocol(const ProtocolConfig& cfg, int n_classes) {
  cfg.validate();
  if (n_classes < 1) throw std::invalid_argument("n_classes must be >= 1");

  // Gradient coordinate u of each class; optical and spin detunings are the
  // correlated pair (u W_opt, u W_spin), as both shifts track the same ion
  // position in the same gradient.
  std::vector<double> u(n_classes);
  for (int k = 0; k < n_classes; ++k) {
    u[k] = (k + 0.5) / n_classes - 0.5;
  }
  const double w = 1.0 / n_classes;
  const double w_opt = two_pi * cfg.opt_inhom_width_Hz;
  const double w_spin = two_pi * cfg.spin_inhom_width_Hz;
  const double t_d = cfg.timings.t_dephase_s;
  const double t_s = cfg.timings.t_shelf_s;
  const double reversal = (1.0 - cfg.gradient_reversal_error) * w_opt;

  // Rephasing point: u (w_opt t_d + w_spin t_s) - u reversal t_rel = 0 for
  // every class simultaneously.
  const double t_rel = (w_opt * t_d + w_spin * t_s) / reversal;
  if (t_rel > cfg.timings.t_rephase_s * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "rephasing falls outside the configured rephase window");
  }

  ProtocolResult out;
  const double f = cfg.pulse_fidelity;

  // phase of class k at elapsed time t, piecewise across steps 2/4/5
  const auto phase = [&](double uk, double t) {
    if (t <= t_d) return uk * w_opt * t;
    if (t <= t_d + t_s) return uk * (w_opt * t_d + w_spin * (t - t_d));
    return uk *
           (w_opt * t_d + w_spin * t_s - reversal * (t - t_d - t_s));
  };
  const auto fidelity_factor = [&](double t) {
    int pulses = 0;
    if (t >= t_d) ++pulses;
    if (t >= t_d + t_s) ++pulses;
    return std::pow(f, pulses);
  };

  const auto sample = [&](double t, int step) {
    std::complex<double> acc{0.0, 0.0};
    for (int k = 0; k < n_classes; ++k) {
      acc += std::polar(w, phase(u[k], t));
    }
    TrajectoryPoint pt;
    pt.t_s = t;
    pt.norm = coherence_retention(cfg, t) * fidelity_factor(t);
    pt.coherence = std::norm(acc) * pt.norm;
    pt.step = step;
    out.trajectory.push_back(pt);
  };

  constexpr int kSamplesPerStep = 160;
  const auto sample_step = [&](double t0, double t1, int step) {
    if (!(t1 > t0)) return;
    for (int i = 0; i <= kSamplesPerStep; ++i) {
      sample(t0 + (t1 - t0) * i / kSamplesPerStep, step);
    }
  };
  sample_step(0.0, t_d, 2);
  sample_step(t_d, t_d + t_s, 4);
  sample_step(t_d + t_s, t_d + t_s + t_rel, 5);

  out.rephasing_peak_time_s = t_d + t_s + t_rel;
  // at the rephasing point every class phase vanishes identically
  out.coherence_at_coupling =
      coherence_retention(cfg, out.rephasing_peak_time_s) * f * f * f;

  out.eta_absorb = 1.0;
  out.eta_coherence = out.coherence_at_coupling;
  out.eta_emit = emission_efficiency(cfg, 1.0);
  out.eta_total = out.eta_absorb * out.eta_coherence * out.eta_emit;
  return out;
}

EmissionResult emission_efficiency_detail(const ProtocolConfig& cfg,
                                          double collective_coherence,
                                          double detuning_rad_per_s,
                                          double t_end_s) {
  cfg.validate();
  if (!(collective_coherence >= 0.0 && collective_coherence <= 1.0)) {
    throw std::invalid_argument("collective_coherence must lie in [0, 1]");
  }
  const double gamma = std::isinf(cfg.T2e_s) ? 0.0 : 1.0 / cfg.T2e_s;
  const double kappa = cfg.cavity_kappa_rad_per_s;
  const double v = cfg.coupling_v_rad_per_s;
  const EmissionOde ode{gamma, kappa, v, detuning_rad_per_s};

  // Energy decay scale: Purcell-like emission plus intrinsic loss. Falls
  // back to a few exchange cycles when the system is lossless.
  double rate_est =
      0.5 * (kappa * v * v / (0.25 * kappa * kappa + v * v) + 2.0 * gamma);
  if (!(rate_est > 0.0)) rate_est = (v > 0.0 ? v : 1.0) / 50.0;

  std::array<double, 6> s{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  EmissionResult out;
  double max_err = 0.0;
  const auto observe = [&](const std::array<double, 6>& st, double t) {
    const double total = st[0] * st[0] + st[1] * st[1] + st[2] * st[2] +
                         st[3] * st[3] + st[4] + st[5];
    max_err = std::max(max_err, std::abs(total - 1.0));
    out.trace.push_back(
        {t, st[0] * st[0] + st[1] * st[1], st[2] * st[2] + st[3] * st[3],
         st[5]});
  };

  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(
      1e-10, 1e-8, odeint::runge_kutta_dopri5<std::array<double, 6>>());

  const double chunk = 3.0 / rate_est;
  const int max_chunks =
      t_end_s > 0.0 ? std::max(1, int(std::ceil(t_end_s / chunk))) : 200;
  double t = 0.0;
  for (int c = 0; c < max_chunks; ++c) {
    double t1 = t + chunk;
    if (t_end_s > 0.0) t1 = std::min(t1, t_end_s);
    odeint::integrate_adaptive(stepper, ode, s, t, t1, chunk / 64.0, observe);
    t = t1;
    if (!std::isfinite(s[0]) || !std::isfinite(s[5])) {
      throw numeric_error("emission integration diverged");
    }
    const double live = s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3];
    if (t_end_s > 0.0 && t >= t_end_s) break;
    if (t_end_s == 0.0 && live < 1e-10) break;
  }

  // keep the trace a manageable size for file output
  if (out.trace.size() > 4000) {
    const std::size_t stride = out.trace.size() / 2000;
    std::vector<std::array<double, 4>> thin;
    for (std::size_t i = 0; i < out.trace.size(); i += stride) {
      thin.push_back(out.trace[i]);
    }
    thin.push_back(out.trace.back());
    out.trace = std::move(thin);
  }

  out.efficiency = s[5] * collective_coherence;
  out.max_conservation_error = max_err;
  return out;
}

double emission_efficiency(const ProtocolConfig& cfg,
                           double collective_coherence) {
  return emission_efficiency_detail(cfg, collective_coherence).efficiency;
}

std::vector<std::array<double, 2>> kappa_scan(const ProtocolConfig& cfg,
                                              double kappa_min_rad_per_s,
                                              double kappa_max_rad_per_s,
                                              int n_points, bool log_spacing) {
  if (!(kappa_min_rad_per_s > 0.0) ||
      !(kappa_max_rad_per_s > kappa_min_rad_per_s) || n_points < 2) {
    throw std::invalid_argument("kappa_scan: bad scan range");
  }
  std::vector<std::array<double, 2>> out;
  out.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double f = double(i) / (n_points - 1);
    const double kappa =
        log_spacing
            ? kappa_min_rad_per_s *
                  std::pow(kappa_max_rad_per_s / kappa_min_rad_per_s, f)
            : kappa_min_rad_per_s +
                  (kappa_max_rad_per_s - kappa_min_rad_per_s) * f;
    ProtocolConfig c = cfg;
    c.cavity_kappa_rad_per_s = kappa;
    out.push_back({kappa, emission_efficiency(c, 1.0)});
  }
  return out;
}

double optimal_kappa(const ProtocolConfig& cfg, double kappa_min_rad_per_s,
                     double kappa_max_rad_per_s, int n_points,
                     bool log_spacing) {
  const auto scan = kappa_scan(cfg, kappa_min_rad_per_s, kappa_max_rad_per_s,
                               n_points, log_spacing);
  double best_k = scan.front()[0], best_eta = -1.0;
  for (const auto& p : scan) {
    if (p[1] > best_eta) {
      best_eta = p[1];
      best_k = p[0];
    }
  }
  return best_k;
}

BandwidthReport bandwidth_report(const ProtocolConfig& cfg) {
  cfg.validate();
  BandwidthReport r;
  r.photon_bandwidth_Hz = cfg.opt_inhom_width_Hz;
  r.absorption_window_s = 1.0 / cfg.opt_inhom_width_Hz;
  r.spin_to_opt_ratio = cfg.spin_inhom_width_Hz / cfg.opt_inhom_width_Hz;
  r.rate_matched = std::abs(r.spin_to_opt_ratio - 1.0) < 1e-6;
  return r;
}

}  // namespace spincoh::transducer
