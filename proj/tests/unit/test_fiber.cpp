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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mimosense/estimation.hpp"
#include "mimosense/fiber.hpp"

using namespace mimosense;
using std::numbers::pi;

namespace {

FiberConfig small_fibre(std::uint64_t seed = 3) {
  FiberConfig cfg;
  cfg.length_m = 200.0;
  cfg.segment_length_m = 2.0;
  cfg.beat_length_m = 2.0;
  cfg.seed = seed;
  return cfg;
}

double pearson(const std::vector<double> &a, const std::vector<double> &b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  return (sab / n - sa / n * sb / n) / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
}

} // namespace

TEST_CASE("segment count and validation") {
  FiberConfig cfg;
  cfg.length_m = 340.0;
  cfg.segment_length_m = 2.0;
  CHECK(cfg.segment_count() == 170);
  CHECK(synthesize(cfg).size() == 170);

  cfg.length_m = 1.0;
  CHECK_THROWS_AS(synthesize(cfg), std::invalid_argument);
  cfg = FiberConfig{};
  cfg.attenuation_db_per_km = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = FiberConfig{};
  cfg.segment_length_m = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("dual-pass attenuation") {
  // 0.2 dB/km over 50 km: 20 dB round-trip power loss
  const double a = dual_pass_attenuation(0.2, 50000.0);
  CHECK(a == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(-10.0 * std::log10(a * a) == doctest::Approx(20.0));
  CHECK(dual_pass_attenuation(0.2, 0.0) == 1.0);

  const FiberRealization fib = synthesize(small_fibre());
  for (std::size_t i = 1; i < fib.size(); ++i) {
    REQUIRE(fib.segments[i].attenuation <= fib.segments[i - 1].attenuation);
    REQUIRE(fib.segments[i].attenuation > 0.0);
    REQUIRE(fib.segments[i].distance_m == doctest::Approx(2.0 * static_cast<double>(i + 1)));
  }
}

TEST_CASE("realizations are reproducible and seeds independent") {
  const FiberRealization a = synthesize(small_fibre(3));
  const FiberRealization b = synthesize(small_fibre(3));
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a.segments[i].phasor == b.segments[i].phasor);
    REQUIRE(a.segments[i].unitary == b.segments[i].unitary);
  }

  FiberConfig cfg = small_fibre(3);
  cfg.length_m = 20000.0;
  const FiberRealization x = synthesize(cfg);
  cfg.seed = 4;
  const FiberRealization y = synthesize(cfg);
  std::vector<double> px, py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    px.push_back(std::arg(x.segments[i].phasor));
    py.push_back(std::arg(y.segments[i].phasor));
  }
  CHECK(std::abs(pearson(px, py)) < 0.05);
}

TEST_CASE("Rayleigh phasors have unit mean power") {
  FiberConfig cfg = small_fibre(21);
  cfg.length_m = 200000.0;
  cfg.attenuation_db_per_km = 0.0;
  const FiberRealization fib = synthesize(cfg);
  double power = 0.0;
  for (const FiberSegment &s : fib.segments) power += std::norm(s.phasor);
  CHECK(power / static_cast<double>(fib.size()) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cumulative unitaries") {
  const FiberRealization fib = synthesize(small_fibre());
  for (const FiberSegment &s : fib.segments) REQUIRE(s.unitary.unitarity_error() <= 1e-11);

  FiberConfig cfg = small_fibre();
  cfg.polarization_enabled = false;
  const FiberRealization twin = synthesize(cfg);
  for (std::size_t i = 0; i < twin.size(); ++i) {
    REQUIRE(twin.segments[i].unitary == JonesMatrix::identity());
    REQUIRE(twin.segments[i].phasor == fib.segments[i].phasor);
  }
}

TEST_CASE("dual-pass response") {
  SUBCASE("identity polarization") {
    FiberSegment seg;
    seg.phasor = std::polar(1.0, pi / 3);
    const JonesMatrix h = backscatter_matrix(seg, reflection_matrix(0.0), rotation(0.0));
    CHECK(max_abs_diff(h, std::polar(1.0, pi / 3) * JonesMatrix::identity()) < 1e-15);
  }

  const FiberRealization fib = synthesize(small_fibre());

  SUBCASE("complex symmetry without transfer or misalignment") {
    for (const JonesMatrix &h : dual_pass_response(fib, 0.0, 0.0)) REQUIRE(std::abs(h.xy - h.yx) <= 1e-11);
  }

  SUBCASE("symmetry breaks with transfer or misalignment") {
    double asym_alpha = 0.0, asym_theta = 0.0;
    for (const JonesMatrix &h : dual_pass_response(fib, 0.03, 0.0)) asym_alpha = std::max(asym_alpha, std::abs(h.xy - h.yx));
    for (const JonesMatrix &h : dual_pass_response(fib, 0.0, 0.2)) asym_theta = std::max(asym_theta, std::abs(h.xy - h.yx));
    CHECK(asym_alpha > 1e-3);
    CHECK(asym_theta > 1e-3);
  }

  SUBCASE("determinant identity") {
    const auto h = dual_pass_response(fib, 0.0, 0.7);
    for (std::size_t i = 0; i < fib.size(); ++i) {
      const FiberSegment &s = fib.segments[i];
      REQUIRE(std::abs(h[i].det()) == doctest::Approx(s.attenuation * s.attenuation * std::norm(s.phasor)));
      const double d = wrap_modulus(0.5 * std::arg(h[i].det()) - std::arg(s.phasor), pi);
      REQUIRE(std::abs(d) <= 1e-10);
    }
  }

  SUBCASE("polarization-free twin gives the phasor phase to every estimator") {
    FiberConfig cfg = small_fibre();
    cfg.polarization_enabled = false;
    const FiberRealization twin = synthesize(cfg);
    const auto h = dual_pass_response(twin, 0.0, 0.0);
    for (std::size_t i = 0; i < twin.size(); ++i) {
      const double p = std::arg(twin.segments[i].phasor);
      REQUIRE(std::abs(wrap_modulus(phase_siso(h[i].xx).phase - p, 2 * pi)) < 1e-12);
      REQUIRE(std::abs(wrap_modulus(phase_simo(h[i].xx, h[i].yx).phase - p, 2 * pi)) < 1e-12);
      REQUIRE(std::abs(wrap_modulus(phase_miso(h[i].xx, h[i].xy).phase - p, 2 * pi)) < 1e-12);
      REQUIRE(std::abs(wrap_modulus(phase_mimo(h[i]).phase - p, pi)) < 1e-12);
    }
  }
}

TEST_CASE("strain phase") {
  // n xi dl 2 pi / lambda for dl = 1 um
  const double single = 1.468 * 0.79 * 1e-6 * 2.0 * pi / 1550e-9;
  CHECK(strain_phase_single(1e-6, 1.468, 0.79, 1550e-9) == doctest::Approx(single));
  CHECK(single == doctest::Approx(4.70).epsilon(2e-3));

  StrainEvent ev;
  ev.displacement_m = {0.0, 1e-6};
  const std::vector<double> dual = strain_phase(ev);
  CHECK(dual[0] == 0.0);
  CHECK(dual[1] == doctest::Approx(2.0 * single));
  CHECK(dual[1] == doctest::Approx(9.40).epsilon(2e-3));

  ev.wavelength_m = 0.0;
  CHECK_THROWS_AS(strain_phase(ev), std::invalid_argument);
}

TEST_CASE("apply_strain rotates the disturbed segment and everything behind it") {
  std::vector<JonesMatrix> h(6, JonesMatrix::identity());
  StrainEvent ev;
  ev.segment_index = 3;
  ev.displacement_m = {0.0, 2e-7};
  const std::vector<StrainEvent> events{ev};
  apply_strain(h, events, 1);
  const cdouble rot = std::polar(1.0, strain_phase(ev)[1]);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const cdouble expect = k >= 2 ? rot : cdouble{1.0};
    REQUIRE(std::abs(h[k].xx - expect) < 1e-15);
    REQUIRE(std::abs(h[k].yy - expect) < 1e-15);
  }

  CHECK_THROWS_AS(apply_strain(h, events, 2), std::invalid_argument);
  ev.segment_index = 7;
  const std::vector<StrainEvent> bad{ev};
  CHECK_THROWS_AS(apply_strain(h, bad, 0), std::invalid_argument);
}
