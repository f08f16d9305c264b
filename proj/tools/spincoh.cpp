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

// spincoh: spin-coherence simulation and fitting toolkit.
//
// Subcommands map onto the library modules: spectrum (Zeeman maps),
// echo-sim (Bloch pulse sequences), fit-mims / fit-t1e / fit-sd (decay
// fits), predict-t2 (coherence extrapolation), transduce (conversion
// protocol). All file quantities are SI with unit suffixes in the names.
//
// Exit codes: 0 success, 1 malformed input, 2 numeric failure or
// non-convergence.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spincoh/constants.hpp"
#include "spincoh/errors.hpp"
#include "spincoh/io.hpp"
#include "spincoh/synth.hpp"
#include "spincoh/version.hpp"

namespace {

namespace fs = std::filesystem;
using spincoh::io::json;

struct GlobalOpts {
  std::uint64_t seed = 12345;
  std::string out_dir = ".";
};

// Collects input paths/bytes for the manifest digest as they are read.
class RunContext {
 public:
  RunContext(std::string command, const GlobalOpts& g, int argc, char** argv)
      : command_(std::move(command)), global_(g) {
    std::string argline;
    for (int i = 0; i < argc; ++i) {
      argline += argv[i];
      argline += '\x1f';
    }
    digest_.add("argv", argline);
    digest_.add("version", spincoh::version);
  }

  std::string read_input(const std::string& path) {
    const std::string content = spincoh::io::read_text_file(path);
    inputs_.push_back(path);
    digest_.add(path, content);
    return content;
  }

  json read_input_json(const std::string& path) {
    return spincoh::io::parse_json(read_input(path), path);
  }

  std::string out_path(const std::string& name) const {
    const fs::path p(name);
    if (p.is_absolute()) return name;
    return (fs::path(global_.out_dir) / p).string();
  }

  void write_output(const std::string& path, const std::string& content) {
    spincoh::io::atomic_write_text(path, content);
    outputs_.push_back(path);
  }

  void write_output_json(const std::string& path, const json& j) {
    write_output(path, j.dump(2) + "\n");
  }

  void finish() {
    if (outputs_.empty()) return;
    spincoh::io::RunManifest m;
    m.command = command_;
    m.inputs = inputs_;
    m.params_digest = digest_.hex();
    m.seed = global_.seed;
    m.outputs = outputs_;
    m.timestamp = spincoh::io::timestamp_utc();
    m.version = spincoh::version;
    spincoh::io::atomic_write_text(
        outputs_.front() + ".manifest.json",
        spincoh::io::manifest_to_json(m).dump(2) + "\n");
  }

  std::uint64_t seed() const { return global_.seed; }

 private:
  std::string command_;
  GlobalOpts global_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  spincoh::io::DigestBuilder digest_;
};

spincoh::relaxation::SDParams load_params(RunContext& ctx,
                                          const std::string& params_path) {
  if (!params_path.empty()) {
    return spincoh::io::sdparams_from_json(ctx.read_input_json(params_path));
  }
  if (const char* env = std::getenv("SPINCOH_PARAMS")) {
    return spincoh::io::sdparams_from_json(ctx.read_input_json(env));
  }
  return spincoh::relaxation::SDParams::er_yso_site1();
}

std::string sidecar_path(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

json plot_spec(const std::string& title, const std::string& data_file,
               const std::string& x_col, const std::string& y_col,
               const std::string& group_by = "") {
  json spec{{"title", title},
            {"x", {{"label", x_col}, {"scale", "linear"}}},
            {"y", {{"label", y_col}, {"scale", "linear"}}},
            {"series", json::array({json{{"file", data_file},
                                         {"x_col", x_col},
                                         {"y_col", y_col}}})}};
  if (!group_by.empty()) spec["series"][0]["group_by"] = group_by;
  return spec;
}

// --- subcommand bodies --------------------------------------------------

struct SpectrumArgs {
  std::string gset = "default";
  double b_min = 0.0;
  double b_max = 20e-3;
  int points = 201;
  double f_max = 1e9;
  std::string out = "spectrum.csv";
  std::string plot;
};

int run_spectrum(RunContext& ctx, const SpectrumArgs& a) {
  const auto gset = a.gset == "default"
                        ? spincoh::zeeman::GTensorSet::default_set()
                        : spincoh::io::gtensor_from_json(
                              ctx.read_input_json(a.gset));
  const auto fields = spincoh::synth::linspace(a.b_min, a.b_max, a.points);
  const auto spectrum =
      spincoh::zeeman::sweep_spectrum(gset, fields, a.f_max);

  std::string csv = "B_T,branch,freq_Hz\n";
  for (const auto& pt : spectrum) {
    csv += spincoh::io::format_double(pt.field_T) + "," + pt.branch + "," +
           spincoh::io::format_double(pt.freq_Hz) + "\n";
  }
  const std::string out = ctx.out_path(a.out);
  ctx.write_output(out, csv);
  if (!a.plot.empty()) {
    ctx.write_output_json(ctx.out_path(a.plot),
                          plot_spec("Zeeman transition map", out, "B_T",
                                    "freq_Hz", "branch"));
  }
  ctx.finish();
  return 0;
}

struct EchoSimArgs {
  std::string seq;
  std::string ensemble;
  std::string out = "echo.csv";
  std::string plot;
};

int run_echo_sim(RunContext& ctx, const EchoSimArgs& a) {
  const auto seq =
      spincoh::io::pulse_sequence_from_json(ctx.read_input_json(a.seq));
  const auto ens =
      spincoh::io::ensemble_from_json(ctx.read_input_json(a.ensemble));
  const auto series = spincoh::blochsim::simulate_sequence(seq, ens);

  spincoh::io::CsvTable t;
  t.columns = {"t_s", "re", "im"};
  for (std::size_t i = 0; i < series.t_s.size(); ++i) {
    t.rows.push_back({series.t_s[i], series.signal[i].real(),
                      series.signal[i].imag()});
  }
  const std::string out = ctx.out_path(a.out);
  ctx.write_output(out, spincoh::io::to_csv(t));
  if (!a.plot.empty()) {
    ctx.write_output_json(ctx.out_path(a.plot),
                          plot_spec("echo signal", out, "t_s", "re"));
  }
  ctx.finish();
  return 0;
}

struct FitArgs {
  std::vector<std::string> data;
  std::vector<std::string> meta;
  std::string params;
  std::string out = "fit.json";
  double tail_start = 0.0;
};

spincoh::echodecay::EchoTrace load_trace(RunContext& ctx,
                                         const std::string& csv,
                                         const std::string& meta) {
  const std::string meta_path = meta.empty() ? sidecar_path(csv) : meta;
  ctx.read_input(csv);
  ctx.read_input(meta_path);
  return spincoh::io::read_echo_trace(csv, meta_path);
}

int finish_fit(RunContext& ctx, const std::string& out,
               const spincoh::fitkit::FitResult& result) {
  ctx.write_output_json(ctx.out_path(out),
                        spincoh::io::fit_result_to_json(result));
  ctx.finish();
  if (!result.converged) {
    std::cerr << "fit did not converge: " << result.message << "\n";
    return 2;
  }
  return 0;
}

int run_fit_mims(RunContext& ctx, const FitArgs& a) {
  const auto trace = load_trace(ctx, a.data.at(0),
                                a.meta.empty() ? "" : a.meta.at(0));
  return finish_fit(ctx, a.out, spincoh::fitkit::fit_mims(trace));
}

int run_fit_t1e(RunContext& ctx, const FitArgs& a) {
  const auto trace = load_trace(ctx, a.data.at(0),
                                a.meta.empty() ? "" : a.meta.at(0));
  return finish_fit(ctx, a.out,
                    spincoh::fitkit::fit_tail_T1e(trace, a.tail_start));
}

int run_fit_sd(RunContext& ctx, const FitArgs& a) {
  std::vector<spincoh::echodecay::EchoTrace> traces;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    traces.push_back(load_trace(
        ctx, a.data[i], i < a.meta.size() ? a.meta[i] : ""));
  }
  const auto tpl = load_params(ctx, a.params);
  return finish_fit(ctx, a.out,
                    spincoh::fitkit::fit_spectral_diffusion(traces, tpl,
                                                            ctx.seed()));
}

struct PredictArgs {
  std::string params;
  double temperature = 0.0;
  double field = 0.0;
  std::string out = "t2_prediction.json";
};

int run_predict_t2(RunContext& ctx, const PredictArgs& a) {
  const auto p = load_params(ctx, a.params);
  const auto est =
      spincoh::echodecay::extract_T2e(p, a.temperature, a.field);

  json j;
  j["finite"] = est.finite;
  j["T2e_s"] = est.finite ? json(est.T2e_s) : json(nullptr);
  j["x_eff"] = est.finite ? json(est.x_eff) : json(nullptr);
  const bool gamma0_zeroed =
      spincoh::relaxation::suppression_factor(
          spincoh::echodecay::site2_g, a.field, a.temperature) <
      spincoh::echodecay::site2_freezeout_threshold;
  j["conditions"] = {{"temperature_K", a.temperature},
                     {"field_T", a.field},
                     {"gamma0_zeroed", gamma0_zeroed},
                     {"scale_gamma_sd", p.scale_gamma_sd}};
  ctx.write_output_json(ctx.out_path(a.out), j);
  ctx.finish();
  return 0;
}

struct TransduceArgs {
  std::string config;
  std::string scan;
  int n_classes = 501;
  std::string out = "transduce.json";
  std::string trajectory;
};

// "kappa=MIN:MAX:log|lin:N" with kappa/2pi bounds in Hz
struct ScanSpec {
  double min_rad = 0.0, max_rad = 0.0;
  bool log_spacing = true;
  int n = 0;
};

ScanSpec parse_scan(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || s.substr(0, eq) != "kappa") {
    throw std::invalid_argument("only kappa scans are supported: " + s);
  }
  std::vector<std::string> parts;
  std::string rest = s.substr(eq + 1);
  std::size_t pos = 0;
  while ((pos = rest.find(':')) != std::string::npos) {
    parts.push_back(rest.substr(0, pos));
    rest = rest.substr(pos + 1);
  }
  parts.push_back(rest);
  if (parts.size() != 4) {
    throw std::invalid_argument("scan format is kappa=min:max:log|lin:count");
  }
  ScanSpec spec;
  spec.min_rad = spincoh::constants::two_pi * std::stod(parts[0]);
  spec.max_rad = spincoh::constants::two_pi * std::stod(parts[1]);
  if (parts[2] == "log") {
    spec.log_spacing = true;
  } else if (parts[2] == "lin") {
    spec.log_spacing = false;
  } else {
    throw std::invalid_argument("scan spacing must be log or lin");
  }
  spec.n = std::stoi(parts[3]);
  return spec;
}

int run_transduce(RunContext& ctx, const TransduceArgs& a) {
  auto cfg =
      spincoh::io::protocol_config_from_json(ctx.read_input_json(a.config));

  json scan_json = json::array();
  if (!a.scan.empty()) {
    const ScanSpec spec = parse_scan(a.scan);
    const auto scan = spincoh::transducer::kappa_scan(
        cfg, spec.min_rad, spec.max_rad, spec.n, spec.log_spacing);
    double best_eta = -1.0;
    for (const auto& row : scan) {
      scan_json.push_back({{"kappa_rad_per_s", row[0]}, {"eta_emit", row[1]}});
      if (row[1] > best_eta) {
        best_eta = row[1];
        cfg.cavity_kappa_rad_per_s = row[0];
      }
    }
  }

  const auto result = spincoh::transducer::run_protocol(cfg, a.n_classes);

  json j;
  j["eta_total"] = result.eta_total;
  j["eta_breakdown"] = {{"absorb", result.eta_absorb},
                        {"coherence", result.eta_coherence},
                        {"emit", result.eta_emit}};
  j["rephasing_peak_time_s"] = result.rephasing_peak_time_s;
  j["kappa_rad_per_s"] = cfg.cavity_kappa_rad_per_s;
  j["kappa_over_2pi_Hz"] =
      cfg.cavity_kappa_rad_per_s / spincoh::constants::two_pi;
  if (!scan_json.empty()) j["kappa_scan"] = scan_json;
  ctx.write_output_json(ctx.out_path(a.out), j);

  if (!a.trajectory.empty()) {
    const auto emission = spincoh::transducer::emission_efficiency_detail(
        cfg, result.coherence_at_coupling);
    spincoh::io::CsvTable t;
    t.columns = {"t_s", "spin_norm", "cavity_norm", "emitted"};
    for (const auto& row : emission.trace) {
      t.rows.push_back({row[0], row[1], row[2], row[3]});
    }
    ctx.write_output(ctx.out_path(a.trajectory), spincoh::io::to_csv(t));
  }
  ctx.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-coherence simulation and fitting toolkit"};
  app.set_version_flag("--version", spincoh::version);
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--seed", global.seed,
                 "seed for multi-start jitter and synthetic noise");
  app.add_option("--out-dir", global.out_dir,
                 "directory for relative output paths");

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "Zeeman field-sweep map");
  sp->add_option("--g", spectrum.gset, "g-tensor JSON file, or 'default'");
  sp->add_option("--Bmin", spectrum.b_min, "sweep start (T)");
  sp->add_option("--Bmax", spectrum.b_max, "sweep end (T)")->required();
  sp->add_option("--points", spectrum.points, "number of field points");
  sp->add_option("--fmax", spectrum.f_max, "frequency cutoff (Hz)");
  sp->add_option("--out", spectrum.out, "output CSV");
  sp->add_option("--plot-spec", spectrum.plot, "plot description JSON");

  EchoSimArgs echosim;
  auto* es = app.add_subcommand("echo-sim", "Bloch pulse-sequence simulation");
  es->add_option("--seq", echosim.seq, "pulse sequence JSON")->required();
  es->add_option("--ensemble", echosim.ensemble, "ensemble JSON")->required();
  es->add_option("--out", echosim.out, "output CSV");
  es->add_option("--plot-spec", echosim.plot, "plot description JSON");

  FitArgs mims, t1e, sd;
  auto* fm = app.add_subcommand("fit-mims", "stretched-exponential echo fit");
  fm->add_option("--data", mims.data, "trace CSV")->required();
  fm->add_option("--meta", mims.meta, "sidecar JSON (default: stem.json)");
  fm->add_option("--out", mims.out, "fit result JSON");

  auto* ft = app.add_subcommand("fit-t1e", "population-lifetime tail fit");
  ft->add_option("--data", t1e.data, "trace CSV")->required();
  ft->add_option("--meta", t1e.meta, "sidecar JSON (default: stem.json)");
  ft->add_option("--tail-start", t1e.tail_start, "tail start t23 (s)")
      ->required();
  ft->add_option("--out", t1e.out, "fit result JSON");

  auto* fsd = app.add_subcommand(
      "fit-sd", "joint spectral-diffusion fit across temperatures");
  fsd->add_option("--data", sd.data, "trace CSVs (repeatable)")->required();
  fsd->add_option("--meta", sd.meta, "sidecar JSONs (default: stem.json)");
  fsd->add_option("--params", sd.params, "fixed-field parameter template");
  fsd->add_option("--out", sd.out, "fit result JSON");

  PredictArgs predict;
  auto* pt = app.add_subcommand("predict-t2", "coherence-lifetime prediction");
  pt->add_option("--params", predict.params, "decay parameter JSON");
  pt->add_option("--T", predict.temperature, "temperature (K)")->required();
  pt->add_option("--B", predict.field, "magnetic field (T)")->required();
  pt->add_option("--out", predict.out, "prediction JSON");

  TransduceArgs transduce;
  auto* td = app.add_subcommand("transduce", "conversion-protocol simulation");
  td->add_option("--config", transduce.config, "protocol JSON")->required();
  td->add_option("--scan", transduce.scan,
                 "kappa scan, e.g. kappa=0.1e6:1e9:log:50 (kappa/2pi in Hz)");
  td->add_option("--n-classes", transduce.n_classes, "frequency classes");
  td->add_option("--out", transduce.out, "summary JSON");
  td->add_option("--trajectory", transduce.trajectory,
                 "emission trajectory CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunContext ctx(command, global, argc, argv);
  try {
    if (sp->parsed()) return run_spectrum(ctx, spectrum);
    if (es->parsed()) return run_echo_sim(ctx, echosim);
    if (fm->parsed()) return run_fit_mims(ctx, mims);
    if (ft->parsed()) return run_fit_t1e(ctx, t1e);
    if (fsd->parsed()) return run_fit_sd(ctx, sd);
    if (pt->parsed()) return run_predict_t2(ctx, predict);
    if (td->parsed()) return run_transduce(ctx, transduce);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const spincoh::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
