// SPDX-License-Identifier: Apache-2.0
//
// mimosense: dual-polarization Rayleigh backscatter simulation for phase-OTDR
// Copyright (C) 2026 The mimosense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mimosense/campaign.hpp"
#include "mimosense/estimation.hpp"

namespace mimosense {

/// Everything a run can be configured with. The on-disk form is one flat
/// JSON object; keys are the field names of the member configs.
struct Settings {
  CampaignConfig campaign; // holds the fibre, probe and processing settings
  FadingMapSpec map;
  std::vector<double> poincare_ratios{0.014, 0.068, 0.34};
  std::size_t poincare_segments{2000};
  std::size_t strain_segment{0}; // 1-based, 0 = no strain
  double strain_amplitude_m{0.0};
  double strain_frequency_hz{0.0};

  FiberConfig &fiber() { return campaign.fiber; }
  const FiberConfig &fiber() const { return campaign.fiber; }
  ProbeConfig &probe() { return campaign.probe; }
  const ProbeConfig &probe() const { return campaign.probe; }

  /// One seed drives the fibre, the probe streams and the campaign.
  void set_seed(std::uint64_t seed);
};

/// Parses a flat JSON object. Unknown keys and ill-typed values raise
/// ConfigError. A manifest written by the tool is accepted as well; its
/// "config" member is used.
Settings settings_from_json(std::string_view text);
Settings load_settings(const std::filesystem::path &path);

/// Canonical JSON text of every key (fixed order, two-space indent).
std::string settings_to_json(const Settings &s);

/// FNV-1a of the canonical text, as 16 hex digits.
std::string settings_hash(const Settings &s);

/// Library version string.
std::string_view version();

/// manifest.json body for a subcommand run.
std::string manifest_json(std::string_view subcommand, const Settings &s, const std::vector<std::string> &inputs,
                          const std::vector<std::string> &outputs);

} // namespace mimosense
