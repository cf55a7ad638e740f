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
#include <vector>

#include "mimosense/jones.hpp"

namespace mimosense {

/// Static fibre description. Segment numbers are 1-based throughout the
/// public surface (segment i ends at i * segment_length); containers are 0-based.
struct FiberConfig {
  double length_m{340.0};
  double segment_length_m{2.0};
  double beat_length_m{10.0};
  double attenuation_db_per_km{0.2};
  double alpha{0.0};          // reflection polarization transfer
  double theta_misalign{0.0}; // input misalignment rotation, radians
  bool polarization_enabled{true};
  std::uint64_t seed{1};

  std::size_t segment_count() const;
  void validate() const;
};

struct FiberSegment {
  JonesMatrix unitary;   // cumulative single-pass forward matrix U_i
  cdouble phasor{1.0};   // Rayleigh phasor p_i
  double attenuation{1.0}; // dual-pass field amplitude factor A_i
  double distance_m{0.0};  // L_i
};

struct FiberRealization {
  double segment_length_m{0.0};
  std::uint64_t seed{0};
  std::vector<FiberSegment> segments;
  /// Birefringence parameters per segment; empty for realizations loaded from disk.
  std::vector<PolarizationParams> params;

  std::size_t size() const { return segments.size(); }
};

/// Dual-pass field amplitude after round trip to `distance_m`:
/// 10^(-2 a L / 20) so that the round-trip power loss is 2 a L dB.
double dual_pass_attenuation(double attenuation_db_per_km, double distance_m);

/// Draws a fibre realization. Phasors and birefringence come from independent
/// substreams of `cfg.seed`, so the polarization-free twin of a fibre
/// (polarization_enabled = false) shares its phasors.
FiberRealization synthesize(const FiberConfig &cfg);

/// H = A p U^T M_alpha U R_theta for one segment.
JonesMatrix backscatter_matrix(const FiberSegment &seg, const JonesMatrix &reflection,
                               const JonesMatrix &misalign);

/// Per-segment dual-pass Jones responses.
std::vector<JonesMatrix> dual_pass_response(const FiberRealization &fib, double alpha, double theta_misalign);

/// Longitudinal displacement applied to one segment.
struct StrainEvent {
  std::size_t segment_index{1};    // 1-based
  std::vector<double> displacement_m; // one sample per frame
  double refr_index{1.468};
  double photoelastic{0.79};
  double wavelength_m{1550e-9};
};

/// Single-pass phase shift n * xi * dl * 2 pi / lambda.
double strain_phase_single(double displacement_m, double refr_index, double photoelastic, double wavelength_m);

/// Dual-pass phase series (twice the single-pass shift).
std::vector<double> strain_phase(const StrainEvent &event);

/// Applies the dual-pass strain phase of every event at `sample` to the
/// responses of the disturbed segment and every segment behind it.
void apply_strain(std::span<JonesMatrix> responses, std::span<const StrainEvent> events, std::size_t sample);

} // namespace mimosense
