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
#include <string>
#include <vector>

#include <json.hpp>

#include "spincoh/blochsim.hpp"
#include "spincoh/echodecay.hpp"
#include "spincoh/fitkit.hpp"
#include "spincoh/transducer.hpp"
#include "spincoh/zeeman.hpp"

namespace spincoh::io {

using json = nlohmann::json;

// Files — reads throw std::invalid_argument naming the path; writes go
// through a temp file + rename so partially written outputs never appear.
std::string read_text_file(const std::string& path);
void atomic_write_text(const std::string& path, const std::string& content);

/// Doubles in CSV output carry 12 significant digits.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

// Domain types <-> JSON
zeeman::GTensorSet gtensor_from_json(const json& j);
json gtensor_to_json(const zeeman::GTensorSet& g);

relaxation::SDParams sdparams_from_json(const json& j);
json sdparams_to_json(const relaxation::SDParams& p);

blochsim::PulseSequence pulse_sequence_from_json(const json& j);
blochsim::EnsembleSpec ensemble_from_json(const json& j);

transducer::ProtocolConfig protocol_config_from_json(const json& j);
json protocol_config_to_json(const transducer::ProtocolConfig& c);

json fit_result_to_json(const fitkit::FitResult& r);

/// Echo traces live as a CSV (t12_s,t23_s,amplitude[,sigma]) plus a JSON
/// sidecar carrying {temperature_K, field_T, sequence[, t1e_s]}.
echodecay::EchoTrace read_echo_trace(const std::string& csv_path,
                                     const std::string& sidecar_path);
CsvTable echo_trace_to_csv(const echodecay::EchoTrace& trace);
json echo_trace_sidecar(const echodecay::EchoTrace& trace);

json parse_json(const std::string& text, const std::string& context);
json read_json_file(const std::string& path);

// Run manifests
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string params_digest;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::string timestamp;
  std::string version;
};

json manifest_to_json(const RunManifest& m);

/// FNV-1a (64-bit) content digest over labeled sections.
class DigestBuilder {
 public:
  DigestBuilder& add(const std::string& label, const std::string& content);
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

/// ISO-8601 UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string timestamp_utc();

}  // namespace spincoh::io
