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

#include "mimosense/fiber.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mimosense {

std::size_t FiberConfig::segment_count() const {
  if (!(segment_length_m > 0.0) || !(length_m >= 0.0)) return 0;
  // tolerate lengths that are exact multiples up to rounding
  return static_cast<std::size_t>(std::floor(length_m / segment_length_m + 1e-9));
}

void FiberConfig::validate() const {
  if (!(segment_length_m > 0.0) || !std::isfinite(segment_length_m))
    throw std::invalid_argument("segment length must be > 0");
  if (!(length_m >= segment_length_m)) throw std::invalid_argument("fibre length must be >= segment length");
  if (!(beat_length_m > 0.0)) throw std::invalid_argument("beat length must be > 0");
  if (!(attenuation_db_per_km >= 0.0)) throw std::invalid_argument("attenuation must be >= 0 dB/km");
  if (!(alpha >= 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!std::isfinite(theta_misalign)) throw std::invalid_argument("misalignment must be finite");
  if (segment_count() == 0) throw std::invalid_argument("fibre has zero segments");
}

double dual_pass_attenuation(double attenuation_db_per_km, double distance_m) {
  const double round_trip_db = 2.0 * attenuation_db_per_km * distance_m / 1000.0;
  return std::pow(10.0, -round_trip_db / 20.0);
}

FiberRealization synthesize(const FiberConfig &cfg) {
  cfg.validate();
  const std::size_t n = cfg.segment_count();
  const double ratio = cfg.segment_length_m / cfg.beat_length_m;

  Rng phasor_rng = substream(cfg.seed, Stream::fiber, 0);
  Rng pol_rng = substream(cfg.seed, Stream::fiber, 1);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  FiberRealization fib;
  fib.segment_length_m = cfg.segment_length_m;
  fib.seed = cfg.seed;
  fib.segments.resize(n);
  fib.params.resize(n);

  PolarizationParams params = draw_haar_params(pol_rng);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) params = evolve_params(params, ratio, pol_rng);
    FiberSegment &seg = fib.segments[k];
    seg.distance_m = static_cast<double>(k + 1) * cfg.segment_length_m;
    seg.attenuation = dual_pass_attenuation(cfg.attenuation_db_per_km, seg.distance_m);
    const double re = gauss(phasor_rng);
    const double im = gauss(phasor_rng);
    seg.phasor = {re, im};
    if (cfg.polarization_enabled) {
      fib.params[k] = params;
      seg.unitary = unitary_from_params(params);
    } else {
      fib.params[k] = PolarizationParams{};
      seg.unitary = JonesMatrix::identity();
    }
  }
  return fib;
}

JonesMatrix backscatter_matrix(const FiberSegment &seg, const JonesMatrix &reflection, const JonesMatrix &misalign) {
  const JonesMatrix round_trip = seg.unitary.transpose() * reflection * seg.unitary * misalign;
  return (seg.attenuation * seg.phasor) * round_trip;
}

std::vector<JonesMatrix> dual_pass_response(const FiberRealization &fib, double alpha, double theta_misalign) {
  const JonesMatrix m = reflection_matrix(alpha);
  const JonesMatrix r = rotation(theta_misalign);
  std::vector<JonesMatrix> out;
  out.reserve(fib.size());
  for (const FiberSegment &seg : fib.segments) out.push_back(backscatter_matrix(seg, m, r));
  return out;
}

double strain_phase_single(double displacement_m, double refr_index, double photoelastic, double wavelength_m) {
  return refr_index * photoelastic * displacement_m * 2.0 * std::numbers::pi / wavelength_m;
}

std::vector<double> strain_phase(const StrainEvent &event) {
  if (!(event.wavelength_m > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  std::vector<double> out;
  out.reserve(event.displacement_m.size());
  for (double dl : event.displacement_m)
    out.push_back(2.0 * strain_phase_single(dl, event.refr_index, event.photoelastic, event.wavelength_m));
  return out;
}

void apply_strain(std::span<JonesMatrix> responses, std::span<const StrainEvent> events, std::size_t sample) {
  for (const StrainEvent &ev : events) {
    if (ev.segment_index < 1 || ev.segment_index > responses.size())
      throw std::invalid_argument("strain segment index " + std::to_string(ev.segment_index) + " out of range");
    if (sample >= ev.displacement_m.size())
      throw std::invalid_argument("strain series shorter than the number of frames");
    const double dl = ev.displacement_m[sample];
    const double phase = 2.0 * strain_phase_single(dl, ev.refr_index, ev.photoelastic, ev.wavelength_m);
    const cdouble rot = std::polar(1.0, phase);
    for (std::size_t k = ev.segment_index - 1; k < responses.size(); ++k) responses[k] = rot * responses[k];
  }
}

} // namespace mimosense
