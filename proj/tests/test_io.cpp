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
#include <cstdlib>
#include <filesystem>
#include <random>

#include "spincoh/io.hpp"
#include "spincoh/synth.hpp"

using namespace spincoh;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "spincoh_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("csv values survive a round trip at 12 significant digits") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-20, 20);

  io::CsvTable table;
  table.columns = {"a", "b"};
  for (int i = 0; i < 200; ++i) {
    table.rows.push_back({mant(rng) * std::pow(10.0, expo(rng)),
                          mant(rng) * std::pow(10.0, expo(rng))});
  }
  const auto parsed = io::parse_csv(io::to_csv(table));
  REQUIRE(parsed.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      const double orig = table.rows[i][c];
      const double back = parsed.rows[i][c];
      CHECK(std::abs(back - orig) <= 1e-11 * std::abs(orig));
    }
  }
}

TEST_CASE("csv parser rejects malformed input") {
  CHECK_THROWS_AS(io::parse_csv("a,b\n1,notanumber\n"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_csv(""), std::invalid_argument);
}

TEST_CASE("g-tensor JSON matches the documented schema") {
  const auto j = io::parse_json(
      R"({"entries":[{"site":"site1","subgroup":"A","state":"excited","g_eff":3.27}]})",
      "inline");
  const auto gset = io::gtensor_from_json(j);
  REQUIRE(gset.entries().size() == 1);
  CHECK(gset.entries()[0].g_eff == 3.27);
  CHECK(gset.entries()[0].state == zeeman::State::excited);

  const auto back = io::gtensor_to_json(gset);
  CHECK(back["entries"][0]["site"] == "site1");
  CHECK(back["entries"][0]["g_eff"] == 3.27);

  CHECK_THROWS_AS(io::gtensor_from_json(io::parse_json("{}", "x")),
                  std::invalid_argument);
}

TEST_CASE("decay parameters round-trip through JSON") {
  const auto p = relaxation::SDParams::er_yso_site1();
  const auto q = io::sdparams_from_json(io::sdparams_to_json(p));
  CHECK(q.gamma0_Hz == p.gamma0_Hz);
  CHECK(q.gamma_sd_Hz == p.gamma_sd_Hz);
  CHECK(q.r_ff_per_s == p.r_ff_per_s);
  CHECK(q.alpha_orbach_Hz == p.alpha_orbach_Hz);
  CHECK(q.delta_orbach_K == p.delta_orbach_K);
  CHECK(q.ref_T_K == p.ref_T_K);
  CHECK(q.ref_B_T == p.ref_B_T);
  CHECK(q.g_bath == p.g_bath);
  CHECK(q.scale_gamma_sd == p.scale_gamma_sd);

  auto j = io::sdparams_to_json(p);
  j.erase("gamma0_Hz");
  CHECK_THROWS_AS(io::sdparams_from_json(j), std::invalid_argument);
}

TEST_CASE("protocol config round-trips through JSON") {
  transducer::ProtocolConfig c;
  c.opt_inhom_width_Hz = 1e6;
  c.spin_inhom_width_Hz = 2e6;
  c.coupling_v_rad_per_s = 2.1e8;
  c.cavity_kappa_rad_per_s = 8.5e8;
  c.T2e_s = 1.8e-3;
  c.x = 2.0;
  c.pulse_fidelity = 0.99;
  c.timings = {1e-6, 5e-7, 2e-6};

  const auto q = io::protocol_config_from_json(io::protocol_config_to_json(c));
  CHECK(q.spin_inhom_width_Hz == c.spin_inhom_width_Hz);
  CHECK(q.timings.t_shelf_s == c.timings.t_shelf_s);
  CHECK(q.pulse_fidelity == c.pulse_fidelity);
}

TEST_CASE("echo traces round-trip through CSV plus sidecar") {
  const auto dir = temp_dir();
  const auto p = relaxation::SDParams::er_yso_site1();
  const auto t23 = synth::logspace(1e-7, 5e-3, 25);
  const auto trace = synth::three_pulse_trace(p, 1.0, 1.2e-3, 2.2, 8.7e-3,
                                              0.3e-6, t23, 0.05, 123);

  const auto csv_path = (dir / "trace.csv").string();
  const auto meta_path = (dir / "trace.json").string();
  io::atomic_write_text(csv_path, io::to_csv(io::echo_trace_to_csv(trace)));
  io::atomic_write_text(meta_path, io::echo_trace_sidecar(trace).dump(2));

  const auto back = io::read_echo_trace(csv_path, meta_path);
  CHECK(back.sequence == echodecay::SequenceType::three_pulse);
  CHECK(back.temperature_K == 2.2);
  CHECK(back.t1e_s == doctest::Approx(1.2e-3).epsilon(1e-12));
  REQUIRE(back.points.size() == trace.points.size());
  for (std::size_t i = 0; i < back.points.size(); ++i) {
    CHECK(back.points[i].amplitude ==
          doctest::Approx(trace.points[i].amplitude).epsilon(1e-11));
  }
}

TEST_CASE("missing files name the path") {
  try {
    io::read_text_file("/no/such/spincoh/file.json");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("/no/such/spincoh/file.json") !=
          std::string::npos);
  }
}

TEST_CASE("atomic writes leave no temp file behind") {
  const auto dir = temp_dir();
  const auto path = (dir / "atomic.txt").string();
  io::atomic_write_text(path, "payload");
  CHECK(io::read_text_file(path) == "payload");
  CHECK_FALSE(fs::exists(path + ".tmp"));
}

TEST_CASE("digest separates sections and is stable") {
  io::DigestBuilder a, b, c;
  a.add("ab", "c");
  b.add("a", "bc");
  c.add("ab", "c");
  CHECK(a.hex() != b.hex());
  CHECK(a.hex() == c.hex());
  CHECK(a.hex().substr(0, 8) == "fnv1a64:");
}

TEST_CASE("timestamps honor SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(io::timestamp_utc() == "1970-01-01T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "86461", 1);
  CHECK(io::timestamp_utc() == "1970-01-02T00:01:01Z");
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("gaussian sampler is deterministic per seed") {
  synth::GaussianSampler g1(42), g2(42), g3(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double a = g1(), b = g2(), c = g3();
    all_equal &= (a == b);
    any_diff |= (a != c);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  // moments sanity
  synth::GaussianSampler g(7);
  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = g();
    sum += v;
    sum2 += v * v;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}
