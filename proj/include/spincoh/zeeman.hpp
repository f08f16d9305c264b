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

#include <span>
#include <string>
#include <vector>

namespace spincoh::zeeman {

enum class Site { site1, site2 };
enum class Subgroup { A, B };
enum class State { ground, excited };

std::string to_string(Site s);
std::string to_string(Subgroup s);
std::string to_string(State s);
Site site_from_string(const std::string& s);
Subgroup subgroup_from_string(const std::string& s);
State state_from_string(const std::string& s);

/// One effective g value for a (site, sub-group, electronic state) branch.
/// Orientation physics is folded into g_eff; the field enters as a scalar.
struct GEntry {
  Site site = Site::site1;
  Subgroup subgroup = Subgroup::A;
  State state = State::ground;
  double g_eff = 0.0;
};

/// Set of effective g values, unique per (site, subgroup, state) key.
class GTensorSet {
 public:
  explicit GTensorSet(std::vector<GEntry> entries);

  /// Site-1 values for the default field orientation: ground 4.75 / 3.85,
  /// excited 4.35 / 3.27 for the two local sub-groups.
  static GTensorSet default_set();

  const std::vector<GEntry>& entries() const { return entries_; }

 private:
  std::vector<GEntry> entries_;
};

struct FieldConfig {
  double magnitude_T = 0.0;
  std::string label;  // orientation note only

  void validate() const;
};

/// Electron-spin transition frequency  nu = g_eff * mu_B * B / h  in Hz.
double transition_frequency(double g_eff, double field_T);

struct SpectrumPoint {
  double field_T = 0.0;
  std::string branch;
  double freq_Hz = 0.0;
};

/// Transition frequency of every branch at every field value, dropping
/// entries above f_max_Hz. Output is ordered by field, then by entry order.
std::vector<SpectrumPoint> sweep_spectrum(const GTensorSet& gset,
                                          std::span<const double> fields_T,
                                          double f_max_Hz);

std::string branch_label(const GEntry& e);

}  // namespace spincoh::zeeman
