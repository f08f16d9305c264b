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

#include "spincoh/zeeman.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "spincoh/constants.hpp"

namespace spincoh::zeeman {

std::string to_string(Site s) { return s == Site::site1 ? "site1" : "site2"; }
std::string to_string(Subgroup s) { return s == Subgroup::A ? "A" : "B"; }
std::string to_string(State s) {
  return s == State::ground ? "ground" : "excited";
}

Site site_from_string(const std::string& s) {
  if (s == "site1") return Site::site1;
  if (s == "site2") return Site::site2;
  throw std::invalid_argument("unknown site: " + s);
}

Subgroup subgroup_from_string(const std::string& s) {
  if (s == "A") return Subgroup::A;
  if (s == "B") return Subgroup::B;
  throw std::invalid_argument("unknown subgroup: " + s);
}

State state_from_string(const std::string& s) {
  if (s == "ground") return State::ground;
  if (s == "excited") return State::excited;
  throw std::invalid_argument("unknown state: " + s);
}

GTensorSet::GTensorSet(std::vector<GEntry> entries)
    : entries_(std::move(entries)) {
  std::set<std::tuple<int, int, int>> keys;
  for (const auto& e : entries_) {
    if (!std::isfinite(e.g_eff) || e.g_eff <= 0.0) {
      throw std::domain_error("g_eff must be finite and > 0");
    }
    auto key = std::make_tuple(static_cast<int>(e.site),
                               static_cast<int>(e.subgroup),
                               static_cast<int>(e.state));
    if (!keys.insert(key).second) {
      throw std::invalid_argument("duplicate (site, subgroup, state) entry: " +
                                  branch_label(e));
    }
  }
}

GTensorSet GTensorSet::default_set() {
  return GTensorSet({
      {Site::site1, Subgroup::A, State::ground, 4.75},
      {Site::site1, Subgroup::B, State::ground, 3.85},
      {Site::site1, Subgroup::A, State::excited, 4.35},
      {Site::site1, Subgroup::B, State::excited, 3.27},
  });
}

void FieldConfig::validate() const {
  if (!std::isfinite(magnitude_T) || magnitude_T < 0.0) {
    throw std::domain_error("field magnitude must be finite and >= 0");
  }
}

double transition_frequency(double g_eff, double field_T) {
  if (!std::isfinite(g_eff) || g_eff <= 0.0) {
    throw std::domain_error("transition_frequency: g_eff must be > 0");
  }
  if (!std::isfinite(field_T) || field_T < 0.0) {
    throw std::domain_error("transition_frequency: field must be >= 0");
  }
  return g_eff * constants::mu_bohr_over_h_Hz_per_T * field_T;
}

std::string branch_label(const GEntry& e) {
  return to_string(e.site) + "-" + to_string(e.subgroup) + "-" +
         to_string(e.state);
}

std::vector<SpectrumPoint> sweep_spectrum(const GTensorSet& gset,
                                          std::span<const double> fields_T,
                                          double f_max_Hz) {
  if (fields_T.empty()) {
    throw std::domain_error("sweep_spectrum: empty field range");
  }
  if (!(f_max_Hz > 0.0)) {
    throw std::domain_error("sweep_spectrum: f_max must be > 0");
  }
  for (std::size_t i = 1; i < fields_T.size(); ++i) {
    if (fields_T[i] < fields_T[i - 1]) {
      throw std::domain_error("sweep_spectrum: field range must be ascending");
    }
  }

  std::vector<SpectrumPoint> out;
  out.reserve(fields_T.size() * gset.entries().size());
  for (double b : fields_T) {
    for (const auto& e : gset.entries()) {
      const double f = transition_frequency(e.g_eff, b);
      if (f <= f_max_Hz) {
        out.push_back({b, branch_label(e), f});
      }
    }
  }
  return out;
}

}  // namespace spincoh::zeeman
