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

#include "spincoh/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spincoh::io {

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open input file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open output file: " + tmp.string());
    }
    out << content;
    if (!out.good()) {
      throw std::runtime_error("failed writing output file: " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("csv row width mismatch");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("csv: missing header line");
  }
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.columns.push_back(cell);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream rs(line);
    while (std::getline(rs, cell, ',')) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("csv: bad numeric cell '" + cell + "'");
      }
      if (pos != cell.size()) {
        throw std::invalid_argument("csv: bad numeric cell '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("csv: row width mismatch");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  try {
    return parse_csv(read_text_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + " (" + path + ")");
  }
}

json parse_json(const std::string& text, const std::string& context) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw std::invalid_argument("malformed JSON: " + context);
  }
  return j;
}

json read_json_file(const std::string& path) {
  return parse_json(read_text_file(path), path);
}

namespace {

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw std::invalid_argument("missing or non-numeric field: " + key);
  }
  return j.at(key).get<double>();
}

double optional_number(const json& j, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) {
    throw std::invalid_argument("non-numeric field: " + key);
  }
  return j.at(key).get<double>();
}

}  // namespace

zeeman::GTensorSet gtensor_from_json(const json& j) {
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    throw std::invalid_argument("g-tensor JSON needs an 'entries' array");
  }
  std::vector<zeeman::GEntry> entries;
  for (const auto& e : j.at("entries")) {
    zeeman::GEntry g;
    g.site = zeeman::site_from_string(e.at("site").get<std::string>());
    g.subgroup =
        zeeman::subgroup_from_string(e.at("subgroup").get<std::string>());
    g.state = zeeman::state_from_string(e.at("state").get<std::string>());
    g.g_eff = require_number(e, "g_eff");
    entries.push_back(g);
  }
  return zeeman::GTensorSet(std::move(entries));
}

json gtensor_to_json(const zeeman::GTensorSet& g) {
  json entries = json::array();
  for (const auto& e : g.entries()) {
    entries.push_back({{"site", zeeman::to_string(e.site)},
                       {"subgroup", zeeman::to_string(e.subgroup)},
                       {"state", zeeman::to_string(e.state)},
                       {"g_eff", e.g_eff}});
  }
  return json{{"entries", entries}};
}

relaxation::SDParams sdparams_from_json(const json& j) {
  relaxation::SDParams p;
  p.gamma0_Hz = require_number(j, "gamma0_Hz");
  p.gamma_sd_Hz = require_number(j, "gamma_sd_Hz");
  p.r_ff_per_s = require_number(j, "r_ff_per_s");
  p.alpha_orbach_Hz = require_number(j, "alpha_orbach_Hz");
  p.delta_orbach_K = require_number(j, "delta_orbach_K");
  p.alpha_raman_per_s_K9 = optional_number(j, "alpha_raman_per_s_K9", 0.0);
  p.alpha_direct_per_s_T4_K =
      optional_number(j, "alpha_direct_per_s_T4_K", 0.0);
  p.ref_T_K = require_number(j, "ref_T_K");
  p.ref_B_T = require_number(j, "ref_B_T");
  p.g_bath = optional_number(j, "g_bath", 4.0);
  p.scale_gamma_sd = j.value("scale_gamma_sd", true);
  p.validate();
  return p;
}

json sdparams_to_json(const relaxation::SDParams& p) {
  return json{{"gamma0_Hz", p.gamma0_Hz},
              {"gamma_sd_Hz", p.gamma_sd_Hz},
              {"r_ff_per_s", p.r_ff_per_s},
              {"alpha_orbach_Hz", p.alpha_orbach_Hz},
              {"delta_orbach_K", p.delta_orbach_K},
              {"alpha_raman_per_s_K9", p.alpha_raman_per_s_K9},
              {"alpha_direct_per_s_T4_K", p.alpha_direct_per_s_T4_K},
              {"ref_T_K", p.ref_T_K},
              {"ref_B_T", p.ref_B_T},
              {"g_bath", p.g_bath},
              {"scale_gamma_sd", p.scale_gamma_sd}};
}

blochsim::PulseSequence pulse_sequence_from_json(const json& j) {
  blochsim::PulseSequence seq;
  for (const auto& p : j.at("pulses")) {
    seq.pulses.push_back({require_number(p, "start_s"),
                          require_number(p, "duration_s"),
                          require_number(p, "rabi_freq_Hz"),
                          optional_number(p, "phase_rad", 0.0)});
  }
  const json& r = j.at("record");
  seq.record = {require_number(r, "start_s"), require_number(r, "end_s"),
                require_number(r, "dt_s")};
  seq.validate();
  return seq;
}

blochsim::EnsembleSpec ensemble_from_json(const json& j) {
  blochsim::EnsembleSpec ens;
  ens.n_classes = int(optional_number(j, "n_classes", 2001));
  ens.linewidth_fwhm_Hz = require_number(j, "linewidth_fwhm_Hz");
  const std::string shape = j.value("lineshape", "lorentzian");
  if (shape == "lorentzian") {
    ens.lineshape = blochsim::Lineshape::lorentzian;
  } else if (shape == "gaussian") {
    ens.lineshape = blochsim::Lineshape::gaussian;
  } else {
    throw std::invalid_argument("unknown lineshape: " + shape);
  }
  // absent T1_s / T2_s mean no relaxation
  ens.T1_s = optional_number(j, "T1_s",
                             std::numeric_limits<double>::infinity());
  ens.T2_s = optional_number(j, "T2_s",
                             std::numeric_limits<double>::infinity());
  ens.validate();
  return ens;
}

transducer::ProtocolConfig protocol_config_from_json(const json& j) {
  transducer::ProtocolConfig c;
  c.opt_inhom_width_Hz = require_number(j, "opt_inhom_width_Hz");
  c.spin_inhom_width_Hz = require_number(j, "spin_inhom_width_Hz");
  c.coupling_v_rad_per_s = require_number(j, "coupling_v_rad_per_s");
  c.cavity_kappa_rad_per_s = require_number(j, "cavity_kappa_rad_per_s");
  c.T2e_s = require_number(j, "T2e_s");
  c.x = optional_number(j, "x", 1.4);
  c.pulse_fidelity = optional_number(j, "pulse_fidelity", 1.0);
  c.gradient_reversal_error =
      optional_number(j, "gradient_reversal_error", 0.0);
  const json& t = j.at("timings");
  c.timings = {require_number(t, "t_dephase_s"),
               require_number(t, "t_shelf_s"),
               require_number(t, "t_rephase_s")};
  c.validate();
  return c;
}

json protocol_config_to_json(const transducer::ProtocolConfig& c) {
  return json{{"opt_inhom_width_Hz", c.opt_inhom_width_Hz},
              {"spin_inhom_width_Hz", c.spin_inhom_width_Hz},
              {"coupling_v_rad_per_s", c.coupling_v_rad_per_s},
              {"cavity_kappa_rad_per_s", c.cavity_kappa_rad_per_s},
              {"T2e_s", c.T2e_s},
              {"x", c.x},
              {"pulse_fidelity", c.pulse_fidelity},
              {"gradient_reversal_error", c.gradient_reversal_error},
              {"timings",
               {{"t_dephase_s", c.timings.t_dephase_s},
                {"t_shelf_s", c.timings.t_shelf_s},
                {"t_rephase_s", c.timings.t_rephase_s}}}};
}

json fit_result_to_json(const fitkit::FitResult& r) {
  json j;
  j["params"] = r.params;
  j["stderrs"] = r.stderrs;
  j["residual_norm"] = r.residual_norm;
  j["n_iter"] = r.n_iter;
  j["converged"] = r.converged;
  j["message"] = r.message;
  return j;
}

echodecay::EchoTrace read_echo_trace(const std::string& csv_path,
                                     const std::string& sidecar_path) {
  const CsvTable table = read_csv_file(csv_path);
  if (table.columns.size() < 3 || table.columns[0] != "t12_s" ||
      table.columns[1] != "t23_s" || table.columns[2] != "amplitude") {
    throw std::invalid_argument(
        "echo trace CSV must start with columns t12_s,t23_s,amplitude: " +
        csv_path);
  }
  const bool has_sigma =
      table.columns.size() >= 4 && table.columns[3] == "sigma";

  const json meta = read_json_file(sidecar_path);
  echodecay::EchoTrace tr;
  const std::string seq = meta.at("sequence").get<std::string>();
  if (seq == "two_pulse") {
    tr.sequence = echodecay::SequenceType::two_pulse;
  } else if (seq == "three_pulse") {
    tr.sequence = echodecay::SequenceType::three_pulse;
  } else {
    throw std::invalid_argument("unknown sequence type: " + seq);
  }
  tr.temperature_K = require_number(meta, "temperature_K");
  tr.field_T = require_number(meta, "field_T");
  tr.t1e_s = optional_number(meta, "t1e_s",
                             std::numeric_limits<double>::infinity());

  for (const auto& row : table.rows) {
    tr.points.push_back(
        {row[0], row[1], row[2], has_sigma ? row[3] : 0.0});
  }
  tr.validate();
  return tr;
}

CsvTable echo_trace_to_csv(const echodecay::EchoTrace& trace) {
  CsvTable t;
  t.columns = {"t12_s", "t23_s", "amplitude"};
  bool any_sigma = false;
  for (const auto& p : trace.points) any_sigma |= p.sigma > 0.0;
  if (any_sigma) t.columns.push_back("sigma");
  for (const auto& p : trace.points) {
    std::vector<double> row = {p.t12_s, p.t23_s, p.amplitude};
    if (any_sigma) row.push_back(p.sigma);
    t.rows.push_back(std::move(row));
  }
  return t;
}

json echo_trace_sidecar(const echodecay::EchoTrace& trace) {
  json j{{"temperature_K", trace.temperature_K},
         {"field_T", trace.field_T},
         {"sequence", trace.sequence == echodecay::SequenceType::two_pulse
                          ? "two_pulse"
                          : "three_pulse"}};
  if (std::isfinite(trace.t1e_s)) j["t1e_s"] = trace.t1e_s;
  return j;
}

json manifest_to_json(const RunManifest& m) {
  return json{{"command", m.command},     {"inputs", m.inputs},
              {"params_digest", m.params_digest}, {"seed", m.seed},
              {"outputs", m.outputs},     {"timestamp", m.timestamp},
              {"version", m.version}};
}

DigestBuilder& DigestBuilder::add(const std::string& label,
                                  const std::string& content) {
  const auto mix = [this](const std::string& s) {
    for (unsigned char c : s) {
      state_ ^= c;
      state_ *= 0x100000001b3ull;
    }
    state_ ^= 0xff;  // section separator
    state_ *= 0x100000001b3ull;
  };
  mix(label);
  mix(content);
  return *this;
}

std::string DigestBuilder::hex() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016" PRIx64, state_);
  return buf;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace spincoh::io
