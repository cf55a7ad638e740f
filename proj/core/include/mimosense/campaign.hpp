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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mimosense/error.hpp"
#include "mimosense/estimation.hpp"
#include "mimosense/fiber.hpp"
#include "mimosense/interrogation.hpp"

namespace mimosense {

enum class SimPath : std::uint8_t { waveform, fast };

std::string_view to_string(SimPath p);
SimPath sim_path_from_string(std::string_view name);

/// Label of the polarization-free baseline (MIMO probe and estimator on the
/// twin fibre with birefringence disabled).
inline constexpr std::string_view kPolFreeLabel = "POLFREE";

struct CampaignConfig {
  std::vector<double> lengths_m{340.0};
  std::size_t fibres_per_length{2000};
  std::vector<Scheme> estimators{Scheme::siso, Scheme::simo, Scheme::miso, Scheme::mimo};
  bool include_pol_free_baseline{false};
  std::uint64_t seed{1};
  SimPath sim_path{SimPath::fast};
  FiberConfig fiber;  // length and seed are set per work unit
  ProbeConfig probe;  // scheme is set per work unit
  PhaseProcessing processing;
  double distance_bin_m{200.0};
  std::size_t histogram_bins{100};
  Scheme reference{Scheme::mimo};
  std::vector<double> crossing_percentiles{75.0, 95.0};
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t threads{0};
  /// Upper bound on simulated segment-frames over all work units; 0 = unlimited.
  std::uint64_t work_budget{0};

  void validate() const;
  /// Estimator labels in run order, baseline last.
  std::vector<std::string> labels() const;
};

struct Histogram {
  std::vector<double> edges;         // bins + 1 edges
  std::vector<std::uint64_t> counts; // bins
  std::uint64_t overflow{0};

  std::uint64_t total() const;
};

struct DistanceCurve {
  std::vector<double> bin_center_m;
  std::vector<double> mean_stdv;
  std::vector<std::uint64_t> count;
};

struct EstimatorStats {
  std::string label;
  std::vector<double> stdv;   // finite segment StDvs, fibre-major
  std::vector<double> snr_db; // aligned with stdv
  std::uint64_t excluded{0};  // segments without a finite StDv
  double mean_flagged_fraction{0.0};
  double mean_stdv{0.0};
  double snr_mean{0.0};
  double snr_var{0.0};
  std::map<double, double> percentiles;
  Histogram histogram;
  DistanceCurve curve;
};

struct LengthStats {
  double length_m{0.0};
  std::size_t segments{0};
  std::size_t fibres{0};
  std::vector<EstimatorStats> estimators;

  const EstimatorStats *find(std::string_view label) const;
};

struct CrossingFractions {
  std::string reference, probe;
  std::map<double, double> fraction; // percentile -> fraction above it
};

struct SnrSummary {
  std::string label;
  double mean_db{0.0};
  double var_db2{0.0};
};

struct SnrDifference {
  std::optional<double> mean_mimo_minus_simo;
  std::optional<double> var_simo_minus_mimo;
};

struct CampaignStats {
  std::vector<LengthStats> lengths;
  std::uint64_t work_units{0};
  std::uint64_t segment_frames{0};
};

/// Linear-interpolation percentile (q in [0, 100]) of unsorted data.
double percentile(std::vector<double> data, double q);

/// Runs every (length, fibre, estimator) work unit and pools the profiles.
/// Deterministic for a given config regardless of the thread count.
/// Throws CampaignBudgetError when the work budget would be exceeded.
CampaignStats run_campaign(const CampaignConfig &cfg);

/// Fraction of `probe` StDvs above the `reference` percentiles at one length.
/// Throws std::invalid_argument if either estimator is missing.
CrossingFractions crossing_fractions(const LengthStats &stats, std::string_view reference, std::string_view probe,
                                     const std::vector<double> &percentiles = {75.0, 95.0});

/// Same with all lengths pooled.
CrossingFractions pooled_crossing_fractions(const CampaignStats &stats, std::string_view reference,
                                            std::string_view probe,
                                            const std::vector<double> &percentiles = {75.0, 95.0});

std::vector<SnrSummary> snr_summary(const LengthStats &stats);
SnrDifference snr_difference(const LengthStats &stats);

/// Raised when the configured work budget does not cover the campaign.
class CampaignBudgetError : public ResourceBudgetError {
public:
  CampaignBudgetError(const std::string &what, std::uint64_t completed, std::uint64_t total, CampaignStats partial)
      : ResourceBudgetError(what), completed_units(completed), total_units(total), partial(std::move(partial)) {}

  std::uint64_t completed_units;
  std::uint64_t total_units;
  CampaignStats partial;
};

/// Writes stats.json, hist_<length>_<label>.csv and stdv_vs_distance.csv.
void write_campaign_outputs(const std::filesystem::path &dir, const CampaignConfig &cfg, const CampaignStats &stats);

/// stats.json body as text (canonical formatting).
std::string campaign_stats_json(const CampaignConfig &cfg, const CampaignStats &stats);

} // namespace mimosense
