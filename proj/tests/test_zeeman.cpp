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
#include <random>
#include <set>

#include "spincoh/zeeman.hpp"

using namespace spincoh;

TEST_CASE("transition frequency reproduces the measured operating points") {
  // 8.7 mT on the g = 3.27 excited branch sits at the 400 MHz drive
  const double f = zeeman::transition_frequency(3.27, 8.7e-3);
  CHECK(f == doctest::Approx(3.98179e8).epsilon(1e-4));
  CHECK(f > 390e6);
  CHECK(f < 410e6);

  // 50 mT pushes the same branch to the ~2 GHz microwave band
  CHECK(zeeman::transition_frequency(3.27, 50e-3) ==
        doctest::Approx(2.2884e9).epsilon(1e-3));

  CHECK(zeeman::transition_frequency(4.75, 0.0) == 0.0);
}

TEST_CASE("transition frequency rejects unphysical inputs") {
  CHECK_THROWS_AS(zeeman::transition_frequency(0.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(zeeman::transition_frequency(-1.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(zeeman::transition_frequency(4.0, -1e-3), std::domain_error);
  CHECK_THROWS_AS(zeeman::transition_frequency(4.0, std::nan("")),
                  std::domain_error);
}

TEST_CASE("linearity and monotonicity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ug(0.1, 15.0), ub(0.0, 0.5),
      ua(0.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    const double g = ug(rng), b = ub(rng), a = ua(rng);
    CHECK(zeeman::transition_frequency(g, a * b) ==
          doctest::Approx(a * zeeman::transition_frequency(g, b))
              .epsilon(1e-12));
    CHECK(zeeman::transition_frequency(g * 1.5, b) >=
          zeeman::transition_frequency(g, b));
    CHECK(zeeman::transition_frequency(g, b + 0.01) >
          zeeman::transition_frequency(g, b));
  }
}

TEST_CASE("g tensor set invariants") {
  CHECK(zeeman::GTensorSet::default_set().entries().size() == 4);

  CHECK_THROWS_AS(
      zeeman::GTensorSet({{zeeman::Site::site1, zeeman::Subgroup::A,
                           zeeman::State::ground, -1.0}}),
      std::domain_error);

  CHECK_THROWS_AS(
      zeeman::GTensorSet({{zeeman::Site::site1, zeeman::Subgroup::A,
                           zeeman::State::ground, 4.0},
                          {zeeman::Site::site1, zeeman::Subgroup::A,
                           zeeman::State::ground, 5.0}}),
      std::invalid_argument);
}

TEST_CASE("field sweep emits the four default branches") {
  const auto gset = zeeman::GTensorSet::default_set();
  std::vector<double> fields;
  for (int i = 0; i <= 40; ++i) fields.push_back(20e-3 * i / 40.0);

  const auto spectrum = zeeman::sweep_spectrum(gset, fields, 1e9);

  std::set<std::string> branches;
  for (const auto& pt : spectrum) {
    branches.insert(pt.branch);
    CHECK(pt.freq_Hz <= 1e9);
  }
  CHECK(branches.size() == 4);

  // pointwise oracle: every emitted point is the direct evaluation
  for (const auto& pt : spectrum) {
    for (const auto& e : gset.entries()) {
      if (zeeman::branch_label(e) == pt.branch) {
        CHECK(pt.freq_Hz ==
              zeeman::transition_frequency(e.g_eff, pt.field_T));
      }
    }
  }

  // nothing above the cutoff was silently kept
  std::size_t expected = 0;
  for (double b : fields) {
    for (const auto& e : gset.entries()) {
      if (zeeman::transition_frequency(e.g_eff, b) <= 1e9) ++expected;
    }
  }
  CHECK(spectrum.size() == expected);
}

TEST_CASE("branch slope ratios follow the g ratios") {
  const auto gset = zeeman::GTensorSet::default_set();
  const std::vector<double> fields = {5e-3, 10e-3, 15e-3};
  const auto spectrum = zeeman::sweep_spectrum(gset, fields, 1e12);
  for (double b : fields) {
    double f475 = 0.0, f385 = 0.0;
    for (const auto& pt : spectrum) {
      if (pt.field_T != b) continue;
      if (pt.branch == "site1-A-ground") f475 = pt.freq_Hz;
      if (pt.branch == "site1-B-ground") f385 = pt.freq_Hz;
    }
    CHECK(f475 / f385 == doctest::Approx(4.75 / 3.85).epsilon(1e-12));
  }
}

TEST_CASE("degenerate sweeps") {
  const zeeman::GTensorSet one({{zeeman::Site::site2, zeeman::Subgroup::B,
                                 zeeman::State::excited, 7.0}});
  const std::vector<double> single = {3e-3};
  CHECK(zeeman::sweep_spectrum(one, single, 1e12).size() == 1);

  CHECK_THROWS_AS(zeeman::sweep_spectrum(one, std::vector<double>{}, 1e9),
                  std::domain_error);
  const std::vector<double> unsorted = {2e-3, 1e-3};
  CHECK_THROWS_AS(zeeman::sweep_spectrum(one, unsorted, 1e9),
                  std::domain_error);
}

TEST_CASE("field config validation") {
  zeeman::FieldConfig f{8.7e-3, "along D1"};
  CHECK_NOTHROW(f.validate());
  f.magnitude_T = -1.0;
  CHECK_THROWS_AS(f.validate(), std::domain_error);
}
