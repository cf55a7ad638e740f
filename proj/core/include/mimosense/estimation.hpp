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
#include <string_view>
#include <vector>

#include "mimosense/interrogation.hpp"
#include "mimosense/jones.hpp"

namespace mimosense {

inline constexpr double kDefaultFlagThreshold = 1e-6;
inline constexpr double kSnrCapDb = 120.0;
inline constexpr double kSnrCapStdv = 1e-6;

/// Estimated phase of one segment at one frame. A sample is flagged when the
/// magnitude of the estimator argument is at or below the threshold; the
/// phase of a flagged sample is meaningless.
struct PhaseSample {
  double phase{0.0};
  bool flagged{false};
};

/// 0.5 arg det(H), defined modulo pi; flagged on |det H|^(1/2) <= threshold.
PhaseSample phase_mimo(const JonesMatrix &h, double threshold = kDefaultFlagThreshold);
/// arg(h_xx + h_yx).
PhaseSample phase_simo(cdouble hxx, cdouble hyx, double threshold = kDefaultFlagThreshold);
/// arg(h_xx).
PhaseSample phase_siso(cdouble hxx, double threshold = kDefaultFlagThreshold);
/// arg(h_xx + h_xy).
PhaseSample phase_miso(cdouble hxx, cdouble hxy, double threshold = kDefaultFlagThreshold);

PhaseSample estimate_phase(Scheme scheme, const JonesMatrix &h, double threshold = kDefaultFlagThreshold);

/// pi for MIMO, 2 pi for the others.
double phase_modulus(Scheme scheme);

/// Wraps into (-modulus/2, modulus/2].
double wrap_modulus(double x, double modulus);

/// Raw per-segment phase series, segment-major.
struct PhaseTraces {
  Scheme scheme{Scheme::mimo};
  std::size_t frames{0};
  std::size_t segments{0};
  double frame_period{0.0};
  std::vector<double> phase;
  std::vector<std::uint8_t> flagged;

  double modulus() const { return phase_modulus(scheme); }
  std::span<const double> series(std::size_t segment) const {
    return std::span<const double>(phase).subspan(segment * frames, frames);
  }
};

PhaseTraces extract_phases(const ChannelEstimate &est, double threshold = kDefaultFlagThreshold);

/// Differential phase series. Series k belongs to segment k + 1 (0-based),
/// i.e. position (k + 2) * L_s; segment 0 only serves as a reference.
struct PhaseTraceSet {
  std::size_t frames{0};
  std::size_t gauge_segments{1};
  double frame_period{0.0};
  double segment_length_m{0.0};
  double modulus{2.0 * 3.14159265358979323846};
  std::vector<std::vector<double>> phase;
  std::vector<std::vector<std::uint8_t>> flagged;

  std::size_t size() const { return phase.size(); }
};

/// phi_diff[k, t] = wrap(phi[k, t] - phi[max(k - g, 0), t]) for k = 1..N-1.
/// Throws std::invalid_argument when gauge_segments is 0 or >= N.
PhaseTraceSet differential_phase(const PhaseTraces &traces, std::size_t gauge_segments, double segment_length_m);

/// Removes jumps larger than modulus / 2 by integer multiples of modulus.
/// Samples marked in `skip` are neither used as references nor corrected
/// beyond the running offset. Idempotent.
std::vector<double> unwrap_time(std::span<const double> series, double modulus,
                                std::span<const std::uint8_t> skip = {});

/// Applies unwrap_time to every series of the set in place.
void unwrap_traces(PhaseTraceSet &set);

/// First-order recursive high-pass y[n] = a (y[n-1] + x[n] - x[n-1]) with
/// a = RC / (RC + dt). cutoff_hz = 0 returns the input.
std::vector<double> highpass(std::span<const double> x, double cutoff_hz, double sample_period_s);

/// Sample standard deviation (n - 1) of the unmasked samples, NaN when fewer
/// than two remain. Deviations are taken from the first valid sample, so a
/// constant series gives exactly 0.
double masked_stdv(std::span<const double> x, std::span<const std::uint8_t> skip = {});

/// 10 log10(1 / sigma^2), capped at kSnrCapDb for sigma < kSnrCapStdv.
double snr_phase_db(double stdv);

struct StdvProfile {
  std::vector<std::size_t> segment_index; // 1-based segment number
  std::vector<double> distance_m;
  std::vector<double> stdv_rad;
  std::vector<double> snr_db;
  std::vector<double> flagged_fraction;
  std::vector<std::uint8_t> capped;
  std::size_t frames_used{0};

  std::size_t size() const { return stdv_rad.size(); }
};

/// Temporal StDv of every differential-phase series over the leading
/// `window_s` seconds (0 = whole trace), after an optional high-pass.
/// Throws std::invalid_argument when the window exceeds the trace.
StdvProfile stdv_profile(const PhaseTraceSet &set, double window_s = 0.0, double highpass_hz = 0.0);

struct PhaseProcessing {
  std::size_t gauge_segments{1};
  double window_s{0.0};
  double highpass_hz{0.0};
  double flag_threshold{kDefaultFlagThreshold};
};

/// extract_phases -> differential_phase -> unwrap_traces -> stdv_profile.
StdvProfile profile_from_estimate(const ChannelEstimate &est, double segment_length_m, const PhaseProcessing &proc);

/// Closed-form SIMO phase-fading coefficient for alpha = 0, theta = 0:
/// e^{j2g} cos2b - j sin2b (e^{j2g} cos2T + sin2T).
cdouble simo_fading_coeff(const PolarizationParams &p);

/// Exact SIMO coupling h_xx + h_yx of U^T M_alpha U R_theta with unit A and p.
cdouble simo_coupling(const PolarizationParams &p, double alpha, double theta_misalign);

enum class FadingAxis : std::uint8_t { beta, gamma, theta_rot };

std::string_view to_string(FadingAxis a);
FadingAxis fading_axis_from_string(std::string_view name);

struct FadingMapSpec {
  FadingAxis x_axis{FadingAxis::theta_rot};
  FadingAxis y_axis{FadingAxis::beta};
  double x_min{-3.14159265358979323846}, x_max{3.14159265358979323846};
  double y_min{-3.14159265358979323846}, y_max{3.14159265358979323846};
  std::size_t nx{181}, ny{181};
  PolarizationParams fixed{};
  double alpha{0.0};
  double theta_misalign{0.0};

  void validate() const;
};

/// Grid of |c|, row-major with rows along y.
struct FadingMap {
  std::vector<double> x, y;
  std::vector<double> value;
  bool analytic{true};

  double at(std::size_t iy, std::size_t ix) const { return value[iy * x.size() + ix]; }
};

/// Closed form when alpha = 0 and theta = 0, otherwise |h_xx + h_yx| of the
/// full construction evaluated at (-beta, gamma, -Theta), the parameter
/// convention of the closed form.
FadingMap fading_map(const FadingMapSpec &spec);

/// |det(U^T M_alpha U R_theta)| on the same grid.
FadingMap mimo_fading_map(const FadingMapSpec &spec);

} // namespace mimosense
