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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimosense/fiber.hpp"
#include "mimosense/jones.hpp"
#include "mimosense/rng.hpp"

namespace mimosense {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Polarization diversity of the interrogator: single/multiple input (TX)
/// and single/multiple output (RX).
enum class Scheme : std::uint8_t { siso = 0, simo = 1, miso = 2, mimo = 3 };

constexpr bool dual_input(Scheme s) { return s == Scheme::miso || s == Scheme::mimo; }
constexpr bool dual_output(Scheme s) { return s == Scheme::simo || s == Scheme::mimo; }
std::string_view to_string(Scheme s);
/// Case-insensitive; throws std::invalid_argument for unknown names.
Scheme scheme_from_string(std::string_view name);

struct ProbeConfig {
  Scheme scheme{Scheme::mimo};
  int code_log2_length{13};
  double symbol_rate_baud{50e6};
  double launch_power_dbm{7.0};
  double laser_linewidth_hz{75.0};
  double rx_noise_sigma_v{1.7e-3};
  std::size_t frames{100};
  /// Receiver conversion gain from normalized field amplitude (sqrt(mW)
  /// at the launch reference, Rayleigh reflectivity folded in) to volts.
  double rx_volts_per_field{0.014};
  double group_index{1.468};
  /// Repeat the single-input code pair so that every scheme shares the
  /// four-sub-frame period of the dual-input arrangement.
  bool equalize_frame_period{true};
  std::size_t memory_budget_bytes{std::size_t{2} << 30};

  std::size_t code_length() const { return std::size_t{1} << code_log2_length; }
  double symbol_period() const { return 1.0 / symbol_rate_baud; }
  double launch_power_mw() const;
  /// Per-quadrature receiver noise expressed in field units.
  double field_noise_sigma() const { return rx_noise_sigma_v / rx_volts_per_field; }
  void validate() const;
};

/// Complementary pair of +/-1 sequences.
struct GolayPair {
  std::vector<std::int8_t> a, b;

  std::size_t size() const { return a.size(); }
};

/// Recursive doubling a' = a|b, b' = a|-b from a = b = [1].
GolayPair golay_pair(int log2_len);

/// Aperiodic autocorrelation at lags -(L-1)..(L-1), integer arithmetic.
std::vector<std::int64_t> aperiodic_autocorrelation(std::span<const std::int8_t> seq);

/// Mapping of fibre segments onto the baud-spaced tap grid: segment i
/// (1-based) echoes at delay i * taps_per_segment symbols.
struct TapGrid {
  std::size_t segments{0};
  std::size_t taps_per_segment{1};

  std::size_t max_delay() const { return segments * taps_per_segment; }
  std::size_t delay(std::size_t segment) const { return segment * taps_per_segment; }
};

/// Taps per segment = round(L_s / (c / (2 n f_symb))), at least one.
TapGrid make_tap_grid(const ProbeConfig &cfg, std::size_t segments, double segment_length_m);

/// Frame structure: `subframes` code slots, each followed by a silent guard
/// at least as long as the round-trip delay of the last segment.
struct ProbeLayout {
  std::size_t code_length{0};
  std::size_t subframes{0};
  std::size_t guard{0};
  TapGrid grid;
  double symbol_period{0.0};

  std::size_t slot_length() const { return code_length + guard; }
  std::size_t frame_symbols() const { return subframes * slot_length(); }
  double frame_period() const { return static_cast<double>(frame_symbols()) * symbol_period; }
};

/// One frame of BPSK symbols on both polarizations plus the per-slot code
/// schedule used by the correlator.
struct Probe {
  ProbeConfig cfg;
  GolayPair pair;
  ProbeLayout layout;
  double amplitude{0.0};                 // per active input polarization
  std::vector<std::uint8_t> slot_code;   // 0 -> a, 1 -> b
  std::vector<std::int8_t> slot_sign_x;  // 0 when silent
  std::vector<std::int8_t> slot_sign_y;
  std::vector<cdouble> x, y;             // frame_symbols() samples each

  /// Complex variance of one estimated channel entry per tap for receiver
  /// noise alone, after correlation over all sub-frames.
  double estimate_noise_variance() const;
};

/// Single-input schemes send (a, b) on X, repeated to four slots when
/// frame periods are equalized. Dual-input schemes send X: (a, b, a, b) and
/// Y: (a, b, -a, -b) at half power each, so sums and differences of the slot
/// correlations separate the two input columns exactly.
Probe build_probe(const ProbeConfig &cfg, const GolayPair &pair, const TapGrid &grid);

/// Convenience: pair and tap grid derived from the config and fibre geometry.
Probe build_probe_for(const ProbeConfig &cfg, std::size_t segments, double segment_length_m);

/// Cumulative Wiener phase path with increment variance 2 pi dnu T_S.
std::vector<double> wiener_phase(double linewidth_hz, double sample_period_s, std::size_t n_samples, Rng &rng);

/// Received field at the coherent receiver, one complex sample per symbol.
struct ReceivedWaveform {
  Scheme scheme{Scheme::mimo};
  std::size_t frames{0};
  std::size_t frame_symbols{0};
  std::vector<cdouble> x;
  std::vector<cdouble> y; // empty for single-output schemes
};

/// Bytes the waveform path would allocate for `frames` frames.
std::size_t waveform_memory_estimate(const Probe &probe);

/// Self-homodyne superposition of all segment echoes:
/// r(t) = sum_i H_i s(t - tau_i) e^{j[phi(t - tau_i) - phi(t)]} + AWGN.
/// Throws ResourceBudgetError when the memory estimate exceeds the budget.
ReceivedWaveform simulate_backscatter(std::span<const JonesMatrix> responses, const Probe &probe,
                                      Rng &laser_rng, Rng &rx_rng, std::span<const StrainEvent> strain = {});

/// Time-indexed channel measurements. Entries a scheme cannot observe are zero:
/// SISO keeps xx, SIMO the x column (xx, yx), MISO the x row (xx, xy).
class ChannelEstimate {
public:
  ChannelEstimate() = default;
  ChannelEstimate(Scheme scheme, std::size_t frames, std::size_t segments, double frame_period);

  Scheme scheme() const { return scheme_; }
  std::size_t frames() const { return frames_; }
  std::size_t segments() const { return segments_; }
  double frame_period() const { return frame_period_; }

  JonesMatrix &at(std::size_t frame, std::size_t segment) { return data_[frame * segments_ + segment]; }
  const JonesMatrix &at(std::size_t frame, std::size_t segment) const { return data_[frame * segments_ + segment]; }
  std::span<const JonesMatrix> frame(std::size_t t) const {
    return std::span<const JonesMatrix>(data_).subspan(t * segments_, segments_);
  }

  /// Zeroes the entries the scheme does not observe.
  void mask_unobserved();

private:
  Scheme scheme_{Scheme::mimo};
  std::size_t frames_{0};
  std::size_t segments_{0};
  double frame_period_{0.0};
  std::vector<JonesMatrix> data_;
};

/// Correlates each slot with its code, combines slots into input columns,
/// normalizes by the code energy, and sums the taps of each segment.
ChannelEstimate estimate_channel(const ReceivedWaveform &received, const Probe &probe);

/// Waveform-free path: H_i e^{j psi_{t,i}} + E_{t,i}, with psi the self-homodyne
/// Wiener increment over the round trip sampled once per frame and E the
/// receiver noise after correlation for the probe layout.
ChannelEstimate fast_channel_sim(std::span<const JonesMatrix> responses, const Probe &probe, Rng &laser_rng,
                                 Rng &rx_rng, std::span<const StrainEvent> strain = {});

} // namespace mimosense
