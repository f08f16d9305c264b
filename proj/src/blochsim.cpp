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

#include "spincoh/blochsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spincoh/constants.hpp"

namespace spincoh::blochsim {

namespace {

using constants::pi;
using constants::two_pi;

constexpr std::size_t kMaxSamples = 20'000'000;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Analytic free precession with relaxation toward M = +z.
Vec3 evolve_free(const Vec3& m, double dt, double delta_rad, double r1,
                 double r2) {
  const double th = delta_rad * dt;
  const double c = std::cos(th), s = std::sin(th);
  const double e2 = r2 == 0.0 ? 1.0 : std::exp(-dt * r2);
  const double e1 = r1 == 0.0 ? 1.0 : std::exp(-dt * r1);
  return {(m.x * c - m.y * s) * e2, (m.x * s + m.y * c) * e2,
          1.0 + (m.z - 1.0) * e1};
}

// Exact rotation about the effective field (w1 cos phi, w1 sin phi, delta).
Vec3 evolve_pulse(const Vec3& m, double dt, double omega1_rad, double phase,
                  double delta_rad) {
  const double wx = omega1_rad * std::cos(phase);
  const double wy = omega1_rad * std::sin(phase);
  const double wz = delta_rad;
  const double w = std::sqrt(wx * wx + wy * wy + wz * wz);
  if (w == 0.0 || dt == 0.0) return m;
  const double nx = wx / w, ny = wy / w, nz = wz / w;
  const double th = w * dt;
  const double c = std::cos(th), s = std::sin(th), k = 1.0 - c;
  const double dot = nx * m.x + ny * m.y + nz * m.z;
  return {m.x * c + (ny * m.z - nz * m.y) * s + nx * dot * k,
          m.y * c + (nz * m.x - nx * m.z) * s + ny * dot * k,
          m.z * c + (nx * m.y - ny * m.x) * s + nz * dot * k};
}

// Inverse standard normal CDF (Acklam's rational approximation, |err|<1e-9).
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::vector<double> sample_times(const RecordWindow& w) {
  const std::size_t n =
      static_cast<std::size_t>((w.end_s - w.start_s) / w.dt_s + 1e-9) + 1;
  if (n > kMaxSamples) {
    throw std::invalid_argument("record window requests too many samples");
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = w.start_s + double(i) * w.dt_s;
  return t;
}

// Per-class simulation driver shared by the signal and norm-drift paths.
template <typename Record>
void run_class(const PulseSequence& seq, double delta_Hz, double r1, double r2,
               const std::vector<double>& times, Record&& record) {
  const double delta_rad = two_pi * delta_Hz;
  Vec3 m{0.0, 0.0, 1.0};
  double tc = 0.0;
  std::size_t si = 0;
  const std::size_t n = times.size();

  auto emit_free = [&](double t_end) {
    while (si < n && times[si] < t_end) {
      record(si, evolve_free(m, times[si] - tc, delta_rad, r1, r2));
      ++si;
    }
  };

  for (const auto& p : seq.pulses) {
    emit_free(p.start_s);
    m = evolve_free(m, p.start_s - tc, delta_rad, r1, r2);
    tc = p.start_s;
    const double w1 = two_pi * p.rabi_freq_Hz;
    const double t_end = p.start_s + p.duration_s;
    while (si < n && times[si] < t_end) {
      record(si, evolve_pulse(m, times[si] - tc, w1, p.phase_rad, delta_rad));
      ++si;
    }
    m = evolve_pulse(m, p.duration_s, w1, p.phase_rad, delta_rad);
    tc = t_end;
  }
  while (si < n) {
    record(si, evolve_free(m, times[si] - tc, delta_rad, r1, r2));
    ++si;
  }
}

}  // namespace

void PulseSequence::validate() const {
  if (!(record.dt_s > 0.0) || !(record.end_s > record.start_s) ||
      record.start_s < 0.0) {
    throw std::invalid_argument("invalid record window");
  }
  double prev_end = 0.0;
  for (const auto& p : pulses) {
    if (p.start_s < 0.0 || !(p.duration_s > 0.0) || !(p.rabi_freq_Hz > 0.0) ||
        !std::isfinite(p.phase_rad)) {
      throw std::invalid_argument("invalid pulse parameters");
    }
    if (p.start_s < prev_end) {
      throw std::invalid_argument("pulses must be sorted and non-overlapping");
    }
    prev_end = p.start_s + p.duration_s;
  }
}

void EnsembleSpec::validate() const {
  if (n_classes < 1 || n_classes % 2 == 0) {
    throw std::invalid_argument("n_classes must be odd and >= 1");
  }
  if (!(linewidth_fwhm_Hz >= 0.0) || !std::isfinite(linewidth_fwhm_Hz)) {
    throw std::invalid_argument("linewidth must be >= 0");
  }
  if (!(T1_s > 0.0) || !(T2_s > 0.0)) {
    throw std::invalid_argument("T1 and T2 must be > 0 (or infinite)");
  }
}

std::vector<double> detuning_grid(const EnsembleSpec& ens) {
  ens.validate();
  std::vector<double> d(ens.n_classes);
  if (ens.linewidth_fwhm_Hz == 0.0) return d;
  const int n = ens.n_classes;
  for (int k = 0; k < n; ++k) {
    const double p = (k + 0.5) / n;
    if (ens.lineshape == Lineshape::lorentzian) {
      d[k] = 0.5 * ens.linewidth_fwhm_Hz * std::tan(pi * (p - 0.5));
    } else {
      const double sigma =
          ens.linewidth_fwhm_Hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
      d[k] = sigma * inverse_normal_cdf(p);
    }
  }
  d[n / 2] = 0.0;  // keep the center class exactly on resonance
  return d;
}

TimeSeries simulate_sequence(const PulseSequence& seq,
                             const EnsembleSpec& ens) {
  seq.validate();
  const std::vector<double> deltas = detuning_grid(ens);
  const std::vector<double> times = sample_times(seq.record);
  const double r1 = std::isinf(ens.T1_s) ? 0.0 : 1.0 / ens.T1_s;
  const double r2 = std::isinf(ens.T2_s) ? 0.0 : 1.0 / ens.T2_s;
  const double w = 1.0 / double(deltas.size());

  std::vector<std::complex<double>> acc(times.size(), {0.0, 0.0});
  for (double delta : deltas) {
    run_class(seq, delta, r1, r2, times, [&](std::size_t i, const Vec3& m) {
      acc[i] += std::complex<double>(w * m.x, w * m.y);
    });
  }
  // receiver phasing: drive phase 0 -> driven response phase 0
  for (auto& s : acc) s *= std::complex<double>(0.0, 1.0);

  return {times, std::move(acc)};
}

double echo_area(const TimeSeries& series, double window_start_s,
                 double window_end_s) {
  if (series.t_s.size() < 2) throw std::domain_error("echo_area: empty series");
  if (!(window_end_s > window_start_s) ||
      window_start_s < series.t_s.front() - 1e-15 ||
      window_end_s > series.t_s.back() + 1e-15) {
    throw std::domain_error("echo_area: window outside record range");
  }
  const auto lo = std::lower_bound(series.t_s.begin(), series.t_s.end(),
                                   window_start_s - 1e-15);
  const auto hi = std::upper_bound(series.t_s.begin(), series.t_s.end(),
                                   window_end_s + 1e-15);
  const std::size_t i0 = std::size_t(lo - series.t_s.begin());
  const std::size_t i1 = std::size_t(hi - series.t_s.begin());
  if (i1 - i0 < 2) throw std::domain_error("echo_area: empty window");

  double area = 0.0;
  for (std::size_t i = i0 + 1; i < i1; ++i) {
    area += 0.5 * (std::abs(series.signal[i - 1]) + std::abs(series.signal[i])) *
            (series.t_s[i] - series.t_s[i - 1]);
  }
  return area;
}

double norm_drift(const PulseSequence& seq, const EnsembleSpec& ens) {
  seq.validate();
  if (!std::isinf(ens.T1_s) || !std::isinf(ens.T2_s)) {
    throw std::domain_error("norm_drift requires T1 = T2 = infinity");
  }
  const std::vector<double> deltas = detuning_grid(ens);
  const std::vector<double> times = sample_times(seq.record);

  double drift = 0.0;
  for (double delta : deltas) {
    run_class(seq, delta, 0.0, 0.0, times, [&](std::size_t, const Vec3& m) {
      const double norm = std::sqrt(m.x * m.x + m.y * m.y + m.z * m.z);
      drift = std::max(drift, std::abs(norm - 1.0));
    });
  }
  return drift;
}

double optimize_pulse_length(const EnsembleSpec& ens, double rabi_freq_Hz) {
  ens.validate();
  if (!(rabi_freq_Hz > 0.0)) {
    throw std::domain_error("optimize_pulse_length: rabi_freq must be > 0");
  }

  const double unit = 1.0 / rabi_freq_Hz;
  const double d_max = 0.80 * unit;
  const double tau = std::max(2e-6, 6.0 * d_max);  // center-to-center delay

  double best_d = 0.0, best_area = -1.0;
  for (int j = 0; j <= 75; ++j) {
    const double d = (0.05 + 0.01 * j) * unit;
    PulseSequence seq;
    seq.pulses.push_back({0.0, d, rabi_freq_Hz, 0.0});
    seq.pulses.push_back({0.5 * d + tau - d, 2.0 * d, rabi_freq_Hz, 0.0});
    const double echo_center = 0.5 * d + 2.0 * tau;
    seq.record = {echo_center - 0.5 * tau, echo_center + 0.5 * tau,
                  tau / 200.0};
    const TimeSeries ts = simulate_sequence(seq, ens);
    const double area =
        echo_area(ts, seq.record.start_s, seq.record.end_s);
    if (area > best_area) {
      best_area = area;
      best_d = d;
    }
  }
  return best_d;
}

}  // namespace spincoh::blochsim
