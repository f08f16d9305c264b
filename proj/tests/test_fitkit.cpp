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

#include "spincoh/fitkit.hpp"
#include "spincoh/synth.hpp"

using namespace spincoh;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// central finite differences of the residual vector vs the analytic Jacobian
double jacobian_mismatch(const fitkit::LeastSquaresModel& model,
                         const VectorXd& log_p) {
  const MatrixXd J = model.jacobian(log_p);
  const double h = 1e-6;
  double worst = 0.0;
  for (int j = 0; j < model.n_params(); ++j) {
    VectorXd lo = log_p, hi = log_p;
    lo[j] -= h;
    hi[j] += h;
    const VectorXd fd = (model.residuals(hi) - model.residuals(lo)) / (2 * h);
    const double scale = std::max(J.col(j).norm(), 1e-12);
    worst = std::max(worst, (fd - J.col(j)).norm() / scale);
  }
  return worst;
}

std::vector<echodecay::EchoTrace> sd_family(double noise, std::uint64_t seed) {
  const auto p = relaxation::SDParams::er_yso_site1();
  const std::vector<double> temps = {1.6, 1.9, 2.2, 2.5, 2.8, 3.0};
  const auto t23 = synth::logspace(1e-7, 6e-3, 36);
  const auto t12 = synth::linspace(0.05e-6, 2.0e-6, 28);

  relaxation::SDParams excited;
  excited.alpha_orbach_Hz = 2e12;
  excited.delta_orbach_K = 75.0;

  std::vector<echodecay::EchoTrace> traces;
  std::uint64_t k = 0;
  for (double T : temps) {
    const double t1e =
        1.0 / relaxation::excited_population_rate(
                  {relaxation::default_pump_rate_per_s,
                   relaxation::default_spont_rate_per_s},
                  excited, T);
    traces.push_back(synth::three_pulse_trace(p, 1.0, t1e, T, 8.7e-3,
                                              0.3e-6, t23, noise,
                                              seed + 101 * k));
    traces.push_back(
        synth::two_pulse_trace(p, 1.0, T, 8.7e-3, t12, noise,
                               seed + 101 * k + 50));
    ++k;
  }
  return traces;
}

}  // namespace

TEST_CASE("analytic Jacobians match finite differences") {
  const echodecay::MimsFitParams mp{1.3, 1.6e-6, 1.4};
  const auto t12 = synth::linspace(0.05e-6, 2e-6, 21);
  const auto mims = synth::mims_trace(mp, t12, 0.0, 1);

  const fitkit::MimsModel mims_model(mims);
  VectorXd lp(3);
  lp << std::log(1.1), std::log(1.4e-6), std::log(1.2);
  CHECK(jacobian_mismatch(mims_model, lp) < 1e-6);

  const fitkit::ExpTailModel tail_model({1e-4, 5e-4, 1e-3, 3e-3},
                                        {0.9, 0.6, 0.4, 0.1},
                                        {1.0, 1.0, 1.0, 1.0});
  VectorXd lp2(2);
  lp2 << std::log(0.95), std::log(1.1e-3);
  CHECK(jacobian_mismatch(tail_model, lp2) < 1e-6);

  const auto traces = sd_family(0.0, 7);
  const std::vector<echodecay::EchoTrace> two = {traces[0], traces[1],
                                                 traces[4], traces[5]};
  const fitkit::SpectralDiffusionModel sd_model(
      two, relaxation::SDParams::er_yso_site1());
  VectorXd lp3(5 + 4);
  lp3 << std::log(2.0e5), std::log(5.0e5), std::log(3.0e4), std::log(4.0e11),
      std::log(35.0), std::log(0.9), std::log(1.1), std::log(0.95),
      std::log(1.05);
  CHECK(jacobian_mismatch(sd_model, lp3) < 1e-6);
}

TEST_CASE("LM accepts only downhill steps") {
  const echodecay::MimsFitParams mp{1.0, 1.6e-6, 1.4};
  const auto t12 = synth::linspace(0.05e-6, 2e-6, 25);
  const fitkit::MimsModel model(synth::mims_trace(mp, t12, 0.02, 3));

  VectorXd bad_init(3);
  bad_init << std::log(0.4), std::log(6e-6), std::log(2.5);
  const double init_cost = 0.5 * model.residuals(bad_init).squaredNorm();
  const auto lm = fitkit::levenberg_marquardt(model, bad_init);
  CHECK(lm.cost <= init_cost);
  CHECK(lm.converged);
}

TEST_CASE("noiseless Mims data is recovered exactly") {
  const echodecay::MimsFitParams mp{2.3, 1.6e-6, 1.4};
  const auto t12 = synth::linspace(0.05e-6, 2e-6, 25);
  const auto fit = fitkit::fit_mims(synth::mims_trace(mp, t12, 0.0, 5));

  REQUIRE(fit.converged);
  CHECK(fit.params.at("A") == doctest::Approx(2.3).epsilon(1e-6));
  CHECK(fit.params.at("T2e_s") == doctest::Approx(1.6e-6).epsilon(1e-6));
  CHECK(fit.params.at("x") == doctest::Approx(1.4).epsilon(1e-6));
  CHECK(fit.residual_norm < 1e-8);
}

TEST_CASE("noisy Mims recovery stays within the quoted uncertainties") {
  const echodecay::MimsFitParams mp{1.0, 1.6e-6, 1.4};
  const auto t12 = synth::linspace(0.05e-6, 2e-6, 30);
  int good = 0;
  const int n_seeds = 20;
  for (int s = 0; s < n_seeds; ++s) {
    const auto fit =
        fitkit::fit_mims(synth::mims_trace(mp, t12, 0.05, 1000 + s));
    if (!fit.converged) continue;
    if (std::abs(fit.params.at("T2e_s") - 1.6e-6) <= 0.2e-6 &&
        std::abs(fit.params.at("x") - 1.4) <= 0.2) {
      ++good;
    }
  }
  CHECK(good >= n_seeds * 9 / 10);
}

TEST_CASE("fits are invariant under amplitude rescaling") {
  const echodecay::MimsFitParams mp{1.0, 1.6e-6, 1.4};
  const auto t12 = synth::linspace(0.05e-6, 2e-6, 30);
  auto trace = synth::mims_trace(mp, t12, 0.05, 42);
  const auto fit1 = fitkit::fit_mims(trace);
  for (auto& p : trace.points) p.amplitude *= 1000.0;
  const auto fit2 = fitkit::fit_mims(trace);

  REQUIRE(fit1.converged);
  REQUIRE(fit2.converged);
  CHECK(fit2.params.at("A") ==
        doctest::Approx(1000.0 * fit1.params.at("A")).epsilon(1e-8));
  CHECK(fit2.params.at("T2e_s") ==
        doctest::Approx(fit1.params.at("T2e_s")).epsilon(1e-8));
  CHECK(fit2.params.at("x") ==
        doctest::Approx(fit1.params.at("x")).epsilon(1e-8));
}

TEST_CASE("constant-amplitude data is flagged as degenerate") {
  echodecay::EchoTrace flat;
  flat.sequence = echodecay::SequenceType::two_pulse;
  for (int i = 0; i < 12; ++i) {
    flat.points.push_back({i * 1e-7, 0.0, 1.0, 0.0});
  }
  const auto fit = fitkit::fit_mims(flat);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("stderr output requires spare degrees of freedom and full rank") {
  const echodecay::MimsFitParams mp{1.0, 1.6e-6, 1.4};
  const auto t12 = synth::linspace(0.05e-6, 2e-6, 30);
  const auto fit = fitkit::fit_mims(synth::mims_trace(mp, t12, 0.05, 9));
  REQUIRE(fit.converged);
  REQUIRE(fit.stderrs.count("T2e_s") == 1);
  CHECK(fit.stderrs.at("T2e_s") > 0.0);
  CHECK(fit.stderrs.at("T2e_s") < 0.3e-6);
}

TEST_CASE("tail fit recovers the population lifetime") {
  // pure exponential: exact recovery
  echodecay::EchoTrace pure;
  pure.sequence = echodecay::SequenceType::three_pulse;
  pure.t1e_s = 1.2e-3;
  for (int i = 0; i < 20; ++i) {
    const double t = 1e-4 + i * 2e-4;
    pure.points.push_back({0.3e-6, t, 0.8 * std::exp(-t / 1.2e-3), 0.0});
  }
  const auto fit = fitkit::fit_tail_T1e(pure, 0.0);
  REQUIRE(fit.converged);
  CHECK(fit.params.at("T1e_s") == doctest::Approx(1.2e-3).epsilon(1e-8));
  CHECK(fit.params.at("A") == doctest::Approx(0.8).epsilon(1e-8));

  // full three-pulse model: tail fit sees only the population term once
  // spectral diffusion has saturated
  const auto p = relaxation::SDParams::er_yso_site1();
  const auto t23 = synth::logspace(1e-7, 6e-3, 40);
  const auto trace =
      synth::three_pulse_trace(p, 1.0, 1.0e-3, 2.0, 8.7e-3, 0.3e-6, t23,
                               0.0, 1);
  const auto fit2 = fitkit::fit_tail_T1e(trace, 5e-4);
  REQUIRE(fit2.converged);
  CHECK(fit2.params.at("T1e_s") == doctest::Approx(1.0e-3).epsilon(0.03));

  CHECK_THROWS_AS(fitkit::fit_tail_T1e(trace, 5.9e-3), std::domain_error);
}

TEST_CASE("joint spectral-diffusion fit: noiseless self-consistency") {
  const auto truth = relaxation::SDParams::er_yso_site1();
  const auto fit =
      fitkit::fit_spectral_diffusion(sd_family(0.0, 11), truth);

  REQUIRE(fit.converged);
  CHECK(fit.params.at("gamma0_Hz") ==
        doctest::Approx(truth.gamma0_Hz).epsilon(0.01));
  CHECK(fit.params.at("gamma_sd_Hz") ==
        doctest::Approx(truth.gamma_sd_Hz).epsilon(0.01));
  CHECK(fit.params.at("r_ff_per_s") ==
        doctest::Approx(truth.r_ff_per_s).epsilon(0.01));
  CHECK(fit.params.at("alpha_orbach_Hz") ==
        doctest::Approx(truth.alpha_orbach_Hz).epsilon(0.01));
  CHECK(fit.params.at("delta_orbach_K") ==
        doctest::Approx(truth.delta_orbach_K).epsilon(0.01));
}

TEST_CASE("joint spectral-diffusion fit: noisy recovery") {
  const auto truth = relaxation::SDParams::er_yso_site1();
  const auto fit =
      fitkit::fit_spectral_diffusion(sd_family(0.05, 77), truth);

  REQUIRE(fit.converged);
  CHECK(std::abs(fit.params.at("gamma0_Hz") / truth.gamma0_Hz - 1.0) < 0.15);
  CHECK(std::abs(fit.params.at("gamma_sd_Hz") / truth.gamma_sd_Hz - 1.0) <
        0.15);
  CHECK(std::abs(fit.params.at("r_ff_per_s") / truth.r_ff_per_s - 1.0) <
        0.15);
  CHECK(std::abs(fit.params.at("alpha_orbach_Hz") / truth.alpha_orbach_Hz -
                 1.0) < 0.30);
  CHECK(std::abs(fit.params.at("delta_orbach_K") / truth.delta_orbach_K -
                 1.0) < 0.30);
}

TEST_CASE("single-temperature family is flagged degenerate") {
  const auto p = relaxation::SDParams::er_yso_site1();
  const auto t23 = synth::logspace(1e-7, 6e-3, 30);
  std::vector<echodecay::EchoTrace> traces = {
      synth::three_pulse_trace(p, 1.0, 1.2e-3, 1.9, 8.7e-3, 0.3e-6, t23, 0.0,
                               1),
      synth::three_pulse_trace(p, 0.8, 1.2e-3, 1.9, 8.7e-3, 0.3e-6, t23, 0.0,
                               2)};
  const auto fit = fitkit::fit_spectral_diffusion(traces, p);
  CHECK_FALSE(fit.converged);
  CHECK(fit.message.find("single temperature") != std::string::npos);
}
