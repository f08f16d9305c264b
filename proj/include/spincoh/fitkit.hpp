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
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spincoh/echodecay.hpp"

namespace spincoh::fitkit {

struct FitResult {
  std::map<std::string, double> params;
  std::map<std::string, double> stderrs;  // present only for full-rank fits
  double residual_norm = 0.0;
  int n_iter = 0;
  bool converged = false;
  std::string message;
};

/// Weighted least-squares problem parameterized in log space (every model
/// parameter is strictly positive). Exposing residuals and the analytic
/// Jacobian separately lets tests finite-difference check the derivatives.
class LeastSquaresModel {
 public:
  virtual ~LeastSquaresModel() = default;
  virtual int n_params() const = 0;
  virtual Eigen::VectorXd residuals(const Eigen::VectorXd& log_p) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& log_p) const = 0;
};

struct LMOptions {
  int max_iter = 500;
  double step_tol = 1e-10;  // relative step size
  double grad_tol = 1e-9;   // infinity norm of J^T r
  double lambda0 = 1e-3;
};

struct LMOutcome {
  Eigen::VectorXd log_p;
  double cost = 0.0;  // 0.5 * ||r||^2
  int n_iter = 0;
  bool converged = false;
  std::string message;
  Eigen::MatrixXd jacobian_at_solution;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal
/// scaling). Steps are accepted only when the cost decreases, so the
/// residual norm is monotone over iterations.
LMOutcome levenberg_marquardt(const LeastSquaresModel& model,
                              Eigen::VectorXd log_p0,
                              const LMOptions& opt = {});

/// A exp[-(2 t / T2e)^x]; log-parameters [ln A, ln T2e, ln x].
class MimsModel : public LeastSquaresModel {
 public:
  explicit MimsModel(const echodecay::EchoTrace& trace);
  int n_params() const override { return 3; }
  Eigen::VectorXd residuals(const Eigen::VectorXd& log_p) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& log_p) const override;

 private:
  std::vector<double> t_, y_, w_;
};

/// A exp(-t / T1e); log-parameters [ln A, ln T1e].
class ExpTailModel : public LeastSquaresModel {
 public:
  ExpTailModel(std::vector<double> t, std::vector<double> y,
               std::vector<double> w);
  int n_params() const override { return 2; }
  Eigen::VectorXd residuals(const Eigen::VectorXd& log_p) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& log_p) const override;

 private:
  std::vector<double> t_, y_, w_;
};

/// Joint two-/three-pulse spectral-diffusion model across temperatures.
///
/// Log-parameters: [ln Gamma0, ln Gamma_SD, ln R_ff, ln alpha_O, ln Delta,
/// ln A0_0, ..., ln A0_{K-1}] with one amplitude per trace. Bath geometry
/// (g_bath, reference conditions, Raman/direct constants, gamma_sd field
/// scaling) is taken from a fixed parameter template and not fitted; the
/// per-trace population lifetime T1e is fixed from the trace metadata.
class SpectralDiffusionModel : public LeastSquaresModel {
 public:
  SpectralDiffusionModel(const std::vector<echodecay::EchoTrace>& traces,
                         const relaxation::SDParams& fixed_template);
  int n_params() const override { return 5 + n_traces_; }
  int n_traces() const { return n_traces_; }
  Eigen::VectorXd residuals(const Eigen::VectorXd& log_p) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& log_p) const override;

 private:
  struct Point {
    double t12, t23, y, w;
    double e_t1;     // exp(-t23 / T1e), fixed
    int trace;
  };
  struct TraceCtx {
    double s_ratio;  // flip-flop suppression ratio vs reference
    double s_sd;     // gamma_sd scaling (1 when disabled)
    double z;        // gamma0 freezeout factor (0 or 1)
    double c_rate;   // fixed Raman + direct rate contribution
    double temperature_K;
  };
  double model_value(const Point& pt, const TraceCtx& cx, double g0,
                     double gsd, double rff, double alpha, double delta,
                     double amp, double* dm_dR, double* dm_dg0,
                     double* dm_dgsd) const;

  std::vector<Point> points_;
  std::vector<TraceCtx> ctx_;
  int n_traces_ = 0;
};

inline constexpr std::uint64_t default_fit_seed = 12345;

/// Stretched-exponential fit of a two-pulse trace (>= 5 points).
FitResult fit_mims(const echodecay::EchoTrace& trace);

/// Exponential fit of the t23 >= tail_start portion of a three-pulse trace
/// (>= 4 points beyond tail_start).
FitResult fit_tail_T1e(const echodecay::EchoTrace& trace,
                       double tail_start_s);

/// Joint fit of {Gamma0, Gamma_SD, R_ff, alpha_O, Delta} to a family of
/// echo decays spanning at least two temperatures. Initialization is
/// data-driven with 8 multi-start points spread log-uniformly one decade
/// around the heuristics; the seed controls the spread and is the only
/// source of randomness.
FitResult fit_spectral_diffusion(const std::vector<echodecay::EchoTrace>& traces,
                                 const relaxation::SDParams& fixed_template,
                                 std::uint64_t seed = default_fit_seed);

}  // namespace spincoh::fitkit
