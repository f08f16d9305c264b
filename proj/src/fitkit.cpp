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

#include "spincoh/fitkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "spincoh/constants.hpp"

namespace spincoh::fitkit {

namespace {

using constants::pi;
using constants::two_pi;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_weight(const echodecay::EchoPoint& p) {
  return p.sigma > 0.0 ? 1.0 / p.sigma : 1.0;
}

// 1/(e^{delta/T} - 1) and its delta-derivative, stable for all delta/T > 0.
double bose_factor(double delta, double T) {
  const double z = delta / T;
  return std::exp(-z) / (-std::expm1(-z));
}

double bose_factor_ddelta(double delta, double T) {
  const double z = delta / T;
  const double em = -std::expm1(-z);  // 1 - e^-z
  return -std::exp(-z) / (em * em) / T;
}

// Covariance-based standard errors in log space; empty when the Jacobian is
// rank deficient or there are no spare degrees of freedom.
VectorXd log_space_stderrs(const MatrixXd& J, double cost) {
  const int n = int(J.cols());
  const int dof = int(J.rows()) - n;
  if (dof <= 0) return {};
  Eigen::ColPivHouseholderQR<MatrixXd> qr(J);
  if (qr.rank() < n) return {};
  const double s2 = 2.0 * cost / dof;
  const MatrixXd cov =
      (J.transpose() * J).ldlt().solve(MatrixXd::Identity(n, n)) * s2;
  VectorXd se(n);
  for (int i = 0; i < n; ++i) se[i] = std::sqrt(std::max(cov(i, i), 0.0));
  return se;
}

void fill_result(FitResult& out, const LMOutcome& lm,
                 const std::vector<std::string>& names) {
  out.residual_norm = std::sqrt(2.0 * lm.cost);
  out.n_iter = lm.n_iter;
  out.converged = lm.converged;
  out.message = lm.message;
  const VectorXd se = log_space_stderrs(lm.jacobian_at_solution, lm.cost);
  for (int i = 0; i < int(names.size()); ++i) {
    const double value = std::exp(lm.log_p[i]);
    out.params[names[i]] = value;
    if (se.size() > 0) out.stderrs[names[i]] = value * se[i];
  }
}

VectorXd to_log(const std::vector<double>& p) {
  VectorXd v(p.size());
  for (int i = 0; i < int(p.size()); ++i) {
    v[i] = std::log(std::max(p[i], 1e-300));
  }
  return v;
}

}  // namespace

LMOutcome levenberg_marquardt(const LeastSquaresModel& model,
                              Eigen::VectorXd log_p, const LMOptions& opt) {
  VectorXd r = model.residuals(log_p);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opt.lambda0;

  LMOutcome out;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    const MatrixXd J = model.jacobian(log_p);
    const VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      out.converged = true;
      out.message = "gradient below tolerance";
      break;
    }
    const MatrixXd A = J.transpose() * J;

    bool stepped = false;
    for (int tries = 0; tries < 60 && !stepped; ++tries) {
      MatrixXd Ad = A;
      for (int i = 0; i < Ad.rows(); ++i) {
        Ad(i, i) += lambda * std::max(A(i, i), 1e-12);
      }
      const VectorXd delta = Ad.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda = std::min(lambda * 3.0, 1e16);
        continue;
      }
      const VectorXd p_new = log_p + delta;
      const VectorXd r_new = model.residuals(p_new);
      const double cost_new =
          r_new.allFinite() ? 0.5 * r_new.squaredNorm() : kInf;
      if (cost_new < cost) {
        const double rel_step = delta.norm() / (log_p.norm() + 1.0);
        log_p = p_new;
        r = r_new;
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        if (rel_step < opt.step_tol) {
          out.converged = true;
          out.message = "step below tolerance";
        }
      } else {
        lambda = std::min(lambda * 3.0, 1e16);
      }
    }
    if (!stepped) {
      out.message = "stalled: no downhill step found";
      break;
    }
    if (out.converged) {
      ++iter;
      break;
    }
  }
  if (out.message.empty()) out.message = "max iterations reached";

  out.log_p = log_p;
  out.cost = cost;
  out.n_iter = iter;
  out.jacobian_at_solution = model.jacobian(log_p);
  return out;
}

// ---------------------------------------------------------------------------
// Mims model

MimsModel::MimsModel(const echodecay::EchoTrace& trace) {
  trace.validate();
  if (trace.sequence != echodecay::SequenceType::two_pulse) {
    throw std::domain_error("fit_mims: requires a two-pulse trace");
  }
  if (trace.points.size() < 5) {
    throw std::domain_error("fit_mims: need at least 5 points");
  }
  for (const auto& p : trace.points) {
    t_.push_back(p.t12_s);
    y_.push_back(p.amplitude);
    w_.push_back(point_weight(p));
  }
}

VectorXd MimsModel::residuals(const VectorXd& lp) const {
  const double A = std::exp(lp[0]), T2 = std::exp(lp[1]), x = std::exp(lp[2]);
  VectorXd r(t_.size());
  for (int i = 0; i < int(t_.size()); ++i) {
    const double u = 2.0 * t_[i] / T2;
    r[i] = (A * std::exp(-std::pow(u, x)) - y_[i]) * w_[i];
  }
  return r;
}

MatrixXd MimsModel::jacobian(const VectorXd& lp) const {
  const double A = std::exp(lp[0]), T2 = std::exp(lp[1]), x = std::exp(lp[2]);
  MatrixXd J(t_.size(), 3);
  for (int i = 0; i < int(t_.size()); ++i) {
    const double u = 2.0 * t_[i] / T2;
    const double ux = u > 0.0 ? std::pow(u, x) : 0.0;
    const double m = A * std::exp(-ux);
    J(i, 0) = m * w_[i];
    J(i, 1) = m * x * ux * w_[i];
    J(i, 2) = u > 0.0 ? -m * ux * std::log(u) * x * w_[i] : 0.0;
  }
  return J;
}

// ---------------------------------------------------------------------------
// Exponential tail model

ExpTailModel::ExpTailModel(std::vector<double> t, std::vector<double> y,
                           std::vector<double> w)
    : t_(std::move(t)), y_(std::move(y)), w_(std::move(w)) {}

VectorXd ExpTailModel::residuals(const VectorXd& lp) const {
  const double A = std::exp(lp[0]), T1 = std::exp(lp[1]);
  VectorXd r(t_.size());
  for (int i = 0; i < int(t_.size()); ++i) {
    r[i] = (A * std::exp(-t_[i] / T1) - y_[i]) * w_[i];
  }
  return r;
}

MatrixXd ExpTailModel::jacobian(const VectorXd& lp) const {
  const double A = std::exp(lp[0]), T1 = std::exp(lp[1]);
  MatrixXd J(t_.size(), 2);
  for (int i = 0; i < int(t_.size()); ++i) {
    const double m = A * std::exp(-t_[i] / T1);
    J(i, 0) = m * w_[i];
    J(i, 1) = m * (t_[i] / T1) * w_[i];
  }
  return J;
}

// ---------------------------------------------------------------------------
// Joint spectral-diffusion model

SpectralDiffusionModel::SpectralDiffusionModel(
    const std::vector<echodecay::EchoTrace>& traces,
    const relaxation::SDParams& tpl) {
  if (traces.empty()) {
    throw std::domain_error("fit_spectral_diffusion: no traces");
  }
  n_traces_ = int(traces.size());
  const double s_ref =
      relaxation::suppression_factor(tpl.g_bath, tpl.ref_B_T, tpl.ref_T_K);
  for (int k = 0; k < n_traces_; ++k) {
    const auto& tr = traces[k];
    tr.validate();
    if (tr.points.empty()) {
      throw std::domain_error("fit_spectral_diffusion: empty trace");
    }
    const bool three = tr.sequence == echodecay::SequenceType::three_pulse;
    if (three && !(tr.t1e_s > 0.0)) {
      throw std::domain_error(
          "fit_spectral_diffusion: three-pulse trace needs a fixed T1e");
    }
    TraceCtx cx;
    cx.temperature_K = tr.temperature_K;
    cx.s_ratio = relaxation::suppression_factor(tpl.g_bath, tr.field_T,
                                                tr.temperature_K) /
                 s_ref;
    cx.s_sd = tpl.scale_gamma_sd ? cx.s_ratio : 1.0;
    cx.z = relaxation::suppression_factor(echodecay::site2_g, tr.field_T,
                                          tr.temperature_K) <
                   echodecay::site2_freezeout_threshold
               ? 0.0
               : 1.0;
    cx.c_rate =
        tpl.alpha_raman_per_s_K9 * std::pow(tr.temperature_K, 9) +
        tpl.alpha_direct_per_s_T4_K * std::pow(tr.field_T, 4) *
            tr.temperature_K;
    ctx_.push_back(cx);

    for (const auto& p : tr.points) {
      Point pt;
      pt.t12 = p.t12_s;
      pt.t23 = p.t23_s;
      pt.y = p.amplitude;
      pt.w = point_weight(p);
      pt.e_t1 = three ? std::exp(-p.t23_s / tr.t1e_s) : 1.0;
      pt.trace = k;
      points_.push_back(pt);
    }
  }
}

double SpectralDiffusionModel::model_value(const Point& pt, const TraceCtx& cx,
                                           double g0, double gsd, double rff,
                                           double alpha, double delta,
                                           double amp, double* dm_dR,
                                           double* dm_dg0,
                                           double* dm_dgsd) const {
  const double R = rff * cx.s_ratio +
                   alpha * bose_factor(delta, cx.temperature_K) + cx.c_rate;
  const double em = -std::expm1(-R * pt.t23);  // 1 - exp(-R t23)
  const double sd_kernel = R * pt.t12 + em;
  const double gamma_eff = cx.z * g0 + 0.5 * gsd * cx.s_sd * sd_kernel;
  const double m = amp * pt.e_t1 * std::exp(-two_pi * pt.t12 * gamma_eff);
  if (dm_dg0) *dm_dg0 = m * (-two_pi * pt.t12) * cx.z;
  if (dm_dgsd) {
    *dm_dgsd = m * (-two_pi * pt.t12) * 0.5 * cx.s_sd * sd_kernel;
  }
  if (dm_dR) {
    *dm_dR = m * (-two_pi * pt.t12) * 0.5 * gsd * cx.s_sd *
             (pt.t12 + pt.t23 * std::exp(-R * pt.t23));
  }
  return m;
}

VectorXd SpectralDiffusionModel::residuals(const VectorXd& lp) const {
  const double g0 = std::exp(lp[0]), gsd = std::exp(lp[1]),
               rff = std::exp(lp[2]), alpha = std::exp(lp[3]),
               delta = std::exp(lp[4]);
  VectorXd r(points_.size());
  for (int i = 0; i < int(points_.size()); ++i) {
    const Point& pt = points_[i];
    const double amp = std::exp(lp[5 + pt.trace]);
    const double m = model_value(pt, ctx_[pt.trace], g0, gsd, rff, alpha,
                                 delta, amp, nullptr, nullptr, nullptr);
    r[i] = (m - pt.y) * pt.w;
  }
  return r;
}

MatrixXd SpectralDiffusionModel::jacobian(const VectorXd& lp) const {
  const double g0 = std::exp(lp[0]), gsd = std::exp(lp[1]),
               rff = std::exp(lp[2]), alpha = std::exp(lp[3]),
               delta = std::exp(lp[4]);
  MatrixXd J = MatrixXd::Zero(points_.size(), n_params());
  for (int i = 0; i < int(points_.size()); ++i) {
    const Point& pt = points_[i];
    const TraceCtx& cx = ctx_[pt.trace];
    const double amp = std::exp(lp[5 + pt.trace]);
    double dm_dR, dm_dg0, dm_dgsd;
    const double m = model_value(pt, cx, g0, gsd, rff, alpha, delta, amp,
                                 &dm_dR, &dm_dg0, &dm_dgsd);
    const double bose = bose_factor(delta, cx.temperature_K);
    const double dbose = bose_factor_ddelta(delta, cx.temperature_K);
    J(i, 0) = dm_dg0 * g0 * pt.w;
    J(i, 1) = dm_dgsd * gsd * pt.w;
    J(i, 2) = dm_dR * cx.s_ratio * rff * pt.w;
    J(i, 3) = dm_dR * bose * alpha * pt.w;
    J(i, 4) = dm_dR * alpha * dbose * delta * pt.w;
    J(i, 5 + pt.trace) = m * pt.w;
  }
  return J;
}

// ---------------------------------------------------------------------------
// fit_mims

FitResult fit_mims(const echodecay::EchoTrace& trace) {
  const MimsModel model(trace);

  double a0 = 0.0, echo_max = 0.0;
  for (const auto& p : trace.points) {
    a0 = std::max(a0, p.amplitude);
    echo_max = std::max(echo_max, 2.0 * p.t12_s);
  }
  if (!(a0 > 0.0)) {
    FitResult r;
    r.message = "degenerate: no positive amplitudes";
    return r;
  }

  // 1/e crossing of the data for the T2e scale
  double t2_init = echo_max > 0.0 ? 0.5 * echo_max : 1.0;
  for (const auto& p : trace.points) {
    if (p.amplitude < a0 / std::exp(1.0)) {
      t2_init = std::max(2.0 * p.t12_s, 1e-12);
      break;
    }
  }

  // log-log slope of the decay exponent for the stretch factor
  double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
  int n_ll = 0;
  for (const auto& p : trace.points) {
    const double ratio = p.amplitude / a0;
    if (p.t12_s > 0.0 && ratio > 1e-12 && ratio < 0.9) {
      const double lx = std::log(2.0 * p.t12_s);
      const double ly = std::log(-std::log(ratio));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n_ll;
    }
  }
  double x_init = 1.5;
  if (n_ll >= 2) {
    const double den = n_ll * sxx - sx * sx;
    if (std::abs(den) > 1e-12) {
      x_init = std::clamp((n_ll * sxy - sx * sy) / den, 0.5, 3.0);
    }
  }

  std::mt19937_64 rng(0x51dec0de);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  LMOutcome best;
  best.cost = kInf;
  for (int s = 0; s < 4; ++s) {
    double t2 = t2_init, x = x_init;
    if (s > 0) {
      t2 *= std::pow(10.0, u(rng));
      x = std::clamp(x * std::pow(10.0, 0.3 * u(rng)), 0.5, 3.5);
    }
    const LMOutcome lm =
        levenberg_marquardt(model, to_log({a0, t2, x}));
    if (lm.cost < best.cost) best = lm;
  }

  FitResult out;
  fill_result(out, best, {"A", "T2e_s", "x"});
  const double t2e = out.params["T2e_s"];
  if (echo_max > 0.0 && t2e > 100.0 * echo_max) {
    out.converged = false;
    out.message = "degenerate: no decay within the sampled delay range";
  } else if (out.params["x"] < 1.0 || out.params["x"] > 3.0) {
    out.message += "; x outside [1, 3]";
  }
  return out;
}

// ---------------------------------------------------------------------------
// fit_tail_T1e

FitResult fit_tail_T1e(const echodecay::EchoTrace& trace,
                       double tail_start_s) {
  trace.validate();
  if (trace.sequence != echodecay::SequenceType::three_pulse) {
    throw std::domain_error("fit_tail_T1e: requires a three-pulse trace");
  }
  std::vector<double> t, y, w;
  for (const auto& p : trace.points) {
    if (p.t23_s >= tail_start_s) {
      t.push_back(p.t23_s);
      y.push_back(p.amplitude);
      w.push_back(point_weight(p));
    }
  }
  if (t.size() < 4) {
    throw std::domain_error("fit_tail_T1e: tail too short (need >= 4 points)");
  }

  // log-linear regression for the initial guess
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] > 0.0) {
      const double ly = std::log(y[i]);
      sx += t[i];
      sy += ly;
      sxx += t[i] * t[i];
      sxy += t[i] * ly;
      ++n;
    }
  }
  FitResult out;
  if (n < 2) {
    out.message = "degenerate: tail has no positive amplitudes";
    return out;
  }
  const double den = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / den;
  const double icept = (sy - slope * sx) / n;
  if (slope >= 0.0) {
    out.message = "degenerate: tail does not decay";
    return out;
  }

  const ExpTailModel model(t, y, w);
  const LMOutcome lm =
      levenberg_marquardt(model, to_log({std::exp(icept), -1.0 / slope}));
  fill_result(out, lm, {"A", "T1e_s"});
  return out;
}

// ---------------------------------------------------------------------------
// fit_spectral_diffusion

namespace {

struct SDInit {
  double g0 = 0.0, gsd = 0.0, rff = 0.0, alpha = 0.0, delta = 30.0;
  std::vector<double> amps;
};

SDInit sd_heuristics(const std::vector<echodecay::EchoTrace>& traces) {
  SDInit init;
  std::vector<double> rates, temps;
  double gsd_acc = 0.0;
  int gsd_n = 0;

  for (const auto& tr : traces) {
    double amp = 0.0;
    for (const auto& p : tr.points) amp = std::max(amp, p.amplitude);
    init.amps.push_back(std::max(amp, 1e-12));

    if (tr.sequence != echodecay::SequenceType::three_pulse ||
        tr.points.size() < 6) {
      continue;
    }
    // detrend by the fixed population decay, then read off the saturation
    // drop (-> Gamma_SD) and its half time (-> R)
    std::vector<double> d;
    d.reserve(tr.points.size());
    for (const auto& p : tr.points) {
      d.push_back(std::max(p.amplitude, 1e-12) *
                  std::exp(p.t23_s / tr.t1e_s));
    }
    const auto avg3 = [&](std::size_t i0) {
      return (d[i0] + d[i0 + 1] + d[i0 + 2]) / 3.0;
    };
    const double head = avg3(0), sat = avg3(d.size() - 3);
    const double t12 = tr.points.front().t12_s;
    if (head > sat && sat > 0.0 && t12 > 0.0) {
      const double drop = std::log(head / sat);
      gsd_acc += drop / (pi * t12);
      ++gsd_n;
      const double half = head * std::exp(-0.5 * drop);
      for (const auto& p : tr.points) {
        const double di = std::max(p.amplitude, 1e-12) *
                          std::exp(p.t23_s / tr.t1e_s);
        if (di <= half && p.t23_s > 0.0) {
          rates.push_back(std::log(2.0) / p.t23_s);
          temps.push_back(tr.temperature_K);
          break;
        }
      }
    }
  }
  init.gsd = gsd_n > 0 ? gsd_acc / gsd_n : 1e5;

  // quadratic-exponent regression on two-pulse traces for Gamma0
  double g0_acc = 0.0;
  int g0_n = 0;
  for (const auto& tr : traces) {
    if (tr.sequence != echodecay::SequenceType::two_pulse ||
        tr.points.size() < 5) {
      continue;
    }
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    int n = 0;
    for (const auto& p : tr.points) {
      if (p.amplitude <= 0.0) continue;
      const Eigen::Vector3d row(1.0, -p.t12_s, -p.t12_s * p.t12_s);
      ata += row * row.transpose();
      atb += row * std::log(p.amplitude);
      ++n;
    }
    if (n >= 4) {
      const Eigen::Vector3d coef = ata.ldlt().solve(atb);
      if (coef[1] > 0.0) {
        g0_acc += coef[1] / two_pi;
        ++g0_n;
      }
    }
  }
  init.g0 = g0_n > 0 ? g0_acc / g0_n : 0.5 * init.gsd;

  // rate-vs-temperature split into flip-flop floor + activated term
  if (!rates.empty()) {
    const double r_min = *std::min_element(rates.begin(), rates.end());
    init.rff = 0.8 * r_min;
    std::size_t i_lo = 0, i_hi = 0;
    for (std::size_t i = 1; i < temps.size(); ++i) {
      if (temps[i] < temps[i_lo]) i_lo = i;
      if (temps[i] > temps[i_hi]) i_hi = i;
    }
    const double ex_lo = rates[i_lo] - init.rff;
    const double ex_hi = rates[i_hi] - init.rff;
    if (i_lo != i_hi && ex_lo > 0.0 && ex_hi > ex_lo) {
      const double target = ex_hi / ex_lo;
      double lo = 1.0, hi = 500.0;
      const auto f = [&](double delta) {
        return bose_factor(delta, temps[i_hi]) /
                   bose_factor(delta, temps[i_lo]) -
               target;
      };
      if (f(lo) < 0.0 && f(hi) > 0.0) {
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          (f(mid) < 0.0 ? lo : hi) = mid;
        }
        init.delta = 0.5 * (lo + hi);
      }
      init.alpha = ex_hi / bose_factor(init.delta, temps[i_hi]);
    }
  }
  if (!(init.rff > 0.0)) init.rff = 1e4;
  if (!(init.alpha > 0.0)) init.alpha = 1e11;
  if (!(init.g0 > 0.0)) init.g0 = 1e5;
  if (!(init.gsd > 0.0)) init.gsd = 1e5;
  return init;
}

}  // namespace

FitResult fit_spectral_diffusion(const std::vector<echodecay::EchoTrace>& traces,
                                 const relaxation::SDParams& fixed_template,
                                 std::uint64_t seed) {
  fixed_template.validate();

  std::set<long long> temps;
  for (const auto& tr : traces) {
    temps.insert(llround(tr.temperature_K * 1e9));
  }
  if (temps.size() < 2) {
    FitResult out;
    out.message =
        "degenerate: single temperature; alpha_orbach and delta_orbach are "
        "unidentifiable";
    return out;
  }

  const SpectralDiffusionModel model(traces, fixed_template);
  const SDInit init = sd_heuristics(traces);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  LMOutcome best;
  best.cost = kInf;
  for (int s = 0; s < 8; ++s) {
    std::vector<double> p = {init.g0, init.gsd, init.rff, init.alpha,
                             init.delta};
    if (s > 0) {
      for (auto& v : p) v *= std::pow(10.0, u(rng));
    }
    p.insert(p.end(), init.amps.begin(), init.amps.end());
    const LMOutcome lm = levenberg_marquardt(model, to_log(p));
    if (lm.cost < best.cost) best = lm;
  }

  std::vector<std::string> names = {"gamma0_Hz", "gamma_sd_Hz", "r_ff_per_s",
                                    "alpha_orbach_Hz", "delta_orbach_K"};
  for (int k = 0; k < model.n_traces(); ++k) {
    names.push_back("amp_" + std::to_string(k));
  }
  FitResult out;
  fill_result(out, best, names);
  const double delta = out.params["delta_orbach_K"];
  if (delta < 0.5 || delta > 2000.0) {
    out.message += "; delta_orbach collapsed outside the plausible range";
  }
  return out;
}

}  // namespace spincoh::fitkit
