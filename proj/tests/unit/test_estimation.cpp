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
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mimosense/estimation.hpp"
#include "mimosense/fiber.hpp"
#include "mimosense/interrogation.hpp"
#include "mimosense/jones.hpp"

using namespace mimosense;
using std::numbers::pi;

namespace {

// Plain 2x2 algebra for the oracles below, independent of the library types.
using M2 = std::array<std::complex<double>, 4>; // xx, xy, yx, yy

M2 mul(const M2 &a, const M2 &b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

M2 forward(double beta, double theta, double gamma) {
  const std::complex<double> j(0.0, 1.0);
  const M2 db{std::exp(j * beta), 0.0, 0.0, std::exp(-j * beta)};
  const M2 dg{std::exp(j * gamma), 0.0, 0.0, std::exp(-j * gamma)};
  const M2 r{std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)};
  return mul(mul(db, r), dg);
}

M2 round_trip(double beta, double theta, double gamma) {
  const M2 u = forward(beta, theta, gamma);
  const M2 ut{u[0], u[2], u[1], u[3]};
  return mul(ut, u);
}

JonesMatrix to_jones(const M2 &m) { return {m[0], m[1], m[2], m[3]}; }

double mod_distance(double a, double b, double modulus) { return std::abs(wrap_modulus(a - b, modulus)); }

ChannelEstimate constant_estimate(std::size_t frames, std::size_t segments) {
  ChannelEstimate est(Scheme::mimo, frames, segments, 1e-3);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t i = 0; i < segments; ++i) est.at(t, i) = JonesMatrix::identity();
  return est;
}

} // namespace

TEST_CASE("estimator examples") {
  const cdouble e03 = std::polar(1.0, 0.3);
  CHECK(phase_mimo({e03, 0.0, 0.0, e03}).phase == doctest::Approx(0.3));
  // det phase 3.4 lies outside (-pi, pi]; half of it is taken modulo pi
  const JonesMatrix h{std::polar(1.0, 1.7), 0.0, 0.0, std::polar(1.0, 1.7)};
  CHECK(phase_mimo(h).phase == doctest::Approx(1.7 - pi));
  CHECK(phase_simo(1.0, cdouble(0.0, 1.0)).phase == doctest::Approx(pi / 4));
  CHECK(phase_siso(-1.0).phase == doctest::Approx(pi));
  CHECK(phase_miso(cdouble(0.0, 2.0), cdouble(0.0, 1.0)).phase == doctest::Approx(pi / 2));

  CHECK(phase_mimo(JonesMatrix::zero()).flagged);
  const JonesMatrix rank1{1.0, 1.0, 1.0, 1.0};
  CHECK(phase_mimo(rank1).flagged);
  CHECK_FALSE(phase_simo(rank1.xx, rank1.yx).flagged);
  CHECK(phase_simo(1.0, -1.0).flagged);
  CHECK(phase_miso(1.0, -1.0).flagged);
  CHECK(phase_siso(0.5e-6).flagged);
  CHECK_FALSE(phase_siso(2e-6).flagged);

  CHECK(phase_modulus(Scheme::mimo) == doctest::Approx(pi));
  CHECK(phase_modulus(Scheme::simo) == doctest::Approx(2 * pi));
  for (Scheme s : {Scheme::siso, Scheme::simo, Scheme::miso, Scheme::mimo}) {
    const PhaseSample p = estimate_phase(s, {e03, 0.0, 0.0, e03});
    CHECK(p.phase == doctest::Approx(0.3));
  }
}

TEST_CASE("wrap_modulus range") {
  CHECK(wrap_modulus(pi, 2 * pi) == doctest::Approx(pi));
  CHECK(wrap_modulus(-pi, 2 * pi) == doctest::Approx(pi));
  CHECK(wrap_modulus(pi / 2, pi) == doctest::Approx(pi / 2));
  CHECK(wrap_modulus(-pi / 2, pi) == doctest::Approx(pi / 2));
  CHECK(wrap_modulus(7.0, 2 * pi) == doctest::Approx(7.0 - 2 * pi));
}

TEST_CASE("MIMO estimator invariances") {
  Rng rng = substream(9, Stream::trajectory);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int k = 0; k < 1000; ++k) {
    const JonesMatrix h{{n01(rng), n01(rng)}, {n01(rng), n01(rng)}, {n01(rng), n01(rng)}, {n01(rng), n01(rng)}};
    const JonesMatrix v = sample_haar(rng).second;
    const double ref = phase_mimo(h).phase;
    // unit-determinant unitaries on either side leave det H unchanged
    REQUIRE(mod_distance(phase_mimo(v.transpose() * h * v).phase, ref, pi) < 1e-12);
    const double phi = u(rng);
    REQUIRE(mod_distance(phase_mimo(std::polar(1.0, phi) * h).phase, ref + phi, pi) < 1e-12);
    REQUIRE(mod_distance(phase_simo((std::polar(1.0, phi) * h).xx, (std::polar(1.0, phi) * h).yx).phase,
                         phase_simo(h.xx, h.yx).phase + phi, 2 * pi) < 1e-12);
  }
}

TEST_CASE("single-element fade from a parameter search") {
  // coarse grid search for min |S_xx| of the round trip S = U^T U
  double best = 1e9, bb = 0.0, bt = 0.0;
  for (int ib = 0; ib <= 90; ++ib)
    for (int it = 0; it <= 90; ++it) {
      const double b = ib * (pi / 2) / 90, t = it * (pi / 2) / 90;
      const double v = std::abs(round_trip(b, t, 0.37)[0]);
      if (v < best) best = v, bb = b, bt = t;
    }
  CHECK(best < 1e-12);
  const JonesMatrix s = to_jones(round_trip(bb, bt, 0.37));
  CHECK(phase_siso(s.xx).flagged);
  CHECK_FALSE(phase_mimo(s).flagged);
  CHECK(std::abs(s.det()) == doctest::Approx(1.0));
  CHECK(bb == doctest::Approx(pi / 4));
  CHECK(bt == doctest::Approx(pi / 4));
}

TEST_CASE("time unwrapping") {
  std::vector<double> ramp(200), wrapped(200);
  for (std::size_t n = 0; n < ramp.size(); ++n) {
    ramp[n] = 0.4 * static_cast<double>(n) - 3.0;
    wrapped[n] = wrap_modulus(ramp[n], 2 * pi);
  }
  const auto once = unwrap_time(wrapped, 2 * pi);
  for (std::size_t n = 0; n < ramp.size(); ++n) REQUIRE(once[n] == doctest::Approx(ramp[n]).epsilon(1e-12));
  CHECK(unwrap_time(once, 2 * pi) == once);

  std::vector<double> half(100);
  for (std::size_t n = 0; n < half.size(); ++n) half[n] = wrap_modulus(-0.3 * static_cast<double>(n), pi);
  const auto uh = unwrap_time(half, pi);
  for (std::size_t n = 0; n < half.size(); ++n) REQUIRE(uh[n] == doctest::Approx(-0.3 * static_cast<double>(n)));
  CHECK(unwrap_time(uh, pi) == uh);

  std::vector<std::uint8_t> skip(half.size(), 0);
  std::vector<double> noisy = half;
  noisy[10] = 1.4;
  skip[10] = 1;
  const auto us = unwrap_time(noisy, pi, skip);
  for (std::size_t n = 0; n < half.size(); ++n)
    if (!skip[n]) REQUIRE(us[n] == doctest::Approx(-0.3 * static_cast<double>(n)));
  CHECK_THROWS_AS(unwrap_time(noisy, pi, std::vector<std::uint8_t>(3, 0)), std::invalid_argument);
}

TEST_CASE("standard deviation and SNR") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(masked_stdv(x) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  const std::vector<std::uint8_t> skip{0, 1, 0, 1};
  CHECK(masked_stdv(x, skip) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::isnan(masked_stdv(std::vector<double>{1.0})));
  CHECK(masked_stdv(std::vector<double>(50, 0.731)) == 0.0);

  CHECK(snr_phase_db(0.1) == doctest::Approx(20.0));
  CHECK(snr_phase_db(1.0) == doctest::Approx(0.0));
  CHECK(snr_phase_db(0.0) == kSnrCapDb);
  CHECK(snr_phase_db(0.5e-6) == kSnrCapDb);
}

TEST_CASE("high-pass filter") {
  const std::vector<double> dc(2000, 1.0);
  CHECK(highpass(dc, 0.0, 1e-3) == dc);
  const auto y = highpass(dc, 5.0, 1e-3);
  CHECK(std::abs(y.back()) < 1e-6);

  std::vector<double> tone(4000);
  for (std::size_t n = 0; n < tone.size(); ++n) tone[n] = std::sin(2 * pi * 250.0 * static_cast<double>(n) * 0.5e-3) + 3.0;
  const auto yt = highpass(tone, 1.0, 0.5e-3);
  double peak = 0.0;
  for (std::size_t n = 3000; n < yt.size(); ++n) peak = std::max(peak, std::abs(yt[n]));
  CHECK(peak == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("differential phase layout") {
  ChannelEstimate est = constant_estimate(3, 5);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t i = 0; i < 5; ++i) {
      const cdouble e = std::polar(1.0, 0.1 * static_cast<double>(i * i));
      est.at(t, i) = {e, 0.0, 0.0, e};
    }
  const PhaseTraces tr = extract_phases(est);
  const PhaseTraceSet g1 = differential_phase(tr, 1, 2.0);
  REQUIRE(g1.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const double i = static_cast<double>(k + 1);
    CHECK(g1.phase[k][0] == doctest::Approx(0.1 * (i * i - (i - 1) * (i - 1))));
  }
  const PhaseTraceSet g3 = differential_phase(tr, 3, 2.0);
  CHECK(g3.phase[0][0] == doctest::Approx(0.1));
  CHECK(g3.phase[3][0] == doctest::Approx(0.1 * (16 - 1)));
  CHECK_THROWS_AS(differential_phase(tr, 0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(differential_phase(tr, 5, 2.0), std::invalid_argument);

  const StdvProfile prof = stdv_profile(g1);
  REQUIRE(prof.size() == 4);
  CHECK(prof.segment_index.front() == 2);
  CHECK(prof.distance_m.front() == doctest::Approx(4.0));
  CHECK(prof.stdv_rad.front() == 0.0);
  CHECK(prof.snr_db.front() == kSnrCapDb);
  CHECK(prof.capped.front() == 1);
  CHECK(prof.frames_used == 3);
  CHECK(stdv_profile(g1, 2e-3).frames_used == 2);
  CHECK_THROWS_AS(stdv_profile(g1, 1.0), std::invalid_argument);
}

TEST_CASE("StDv recovers a known phase noise level") {
  constexpr std::size_t frames = 10000;
  constexpr double sigma0 = 0.05;
  ChannelEstimate est = constant_estimate(frames, 2);
  Rng rng = substream(4, Stream::rx);
  std::normal_distribution<double> n01;
  for (std::size_t t = 0; t < frames; ++t) {
    const cdouble e = std::polar(1.0, sigma0 * n01(rng));
    est.at(t, 1) = {e, 0.0, 0.0, e};
  }
  const StdvProfile prof = profile_from_estimate(est, 2.0, PhaseProcessing{});
  REQUIRE(prof.size() == 1);
  CHECK(prof.stdv_rad[0] == doctest::Approx(sigma0).epsilon(0.05));
  CHECK(prof.snr_db[0] == doctest::Approx(-20.0 * std::log10(sigma0)).epsilon(0.02));
}

TEST_CASE("flagged samples are excluded") {
  ChannelEstimate est = constant_estimate(6, 2);
  est.at(2, 1) = JonesMatrix::zero();
  const StdvProfile prof = profile_from_estimate(est, 2.0, PhaseProcessing{});
  CHECK(prof.flagged_fraction[0] == doctest::Approx(1.0 / 6.0));
  CHECK(prof.stdv_rad[0] == 0.0);

  for (std::size_t t = 0; t < 6; ++t) est.at(t, 1) = JonesMatrix::zero();
  const StdvProfile all = profile_from_estimate(est, 2.0, PhaseProcessing{});
  CHECK(all.flagged_fraction[0] == 1.0);
  CHECK(std::isnan(all.stdv_rad[0]));
}

TEST_CASE("closed-form fading coefficient") {
  // bisection oracle for the root in Theta of sin 2T - cos 2T on the beta = pi/4, gamma = pi/2 slice
  double lo = 0.0, hi = pi / 4;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    ((std::sin(2 * lo) - std::cos(2 * lo)) * (std::sin(2 * mid) - std::cos(2 * mid)) <= 0.0 ? hi : lo) = mid;
  }
  const double root = 0.5 * (lo + hi);
  CHECK(root == doctest::Approx(pi / 8).epsilon(1e-12));
  PolarizationParams p;
  p.beta = pi / 4;
  p.gamma = pi / 2;
  p.theta_rot = root;
  CHECK(std::abs(simo_fading_coeff(p)) < 1e-12);

  // the closed form is the exact coupling at (-beta, gamma, -Theta)
  Rng rng = substream(5, Stream::trajectory);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int k = 0; k < 200; ++k) {
    PolarizationParams q;
    q.beta = u(rng);
    q.gamma = u(rng);
    q.theta_rot = u(rng);
    const M2 s = round_trip(-q.beta, -q.theta_rot, q.gamma);
    REQUIRE(std::abs(simo_fading_coeff(q) - (s[0] + s[2])) < 1e-12);
    PolarizationParams qq = q;
    qq.beta = -q.beta;
    qq.theta_rot = -q.theta_rot;
    REQUIRE(std::abs(simo_coupling(qq, 0.0, 0.0) - (s[0] + s[2])) < 1e-12);
  }
}

TEST_CASE("fading maps") {
  FadingMapSpec spec;
  spec.fixed.gamma = pi / 2;
  const FadingMap m = fading_map(spec);
  CHECK(m.analytic);
  REQUIRE(m.x.size() == 181);
  REQUIRE(m.y.size() == 181);
  CHECK(m.x.front() == doctest::Approx(-pi));
  CHECK(m.x.back() == doctest::Approx(pi));

  // nearest grid node to every analytic zero (beta = pi/4 + k pi/2, Theta = pi/8 + l pi/2 on the slice
  // where the closed form vanishes) reads close to zero
  const double step = 2 * pi / 180;
  double max_at_zeros = 0.0;
  for (int kb = -2; kb <= 1; ++kb)
    for (int kt = -2; kt <= 1; ++kt) {
      const double b = pi / 4 + kb * pi / 2, t = pi / 8 + kt * pi / 2;
      PolarizationParams p;
      p.beta = b;
      p.gamma = pi / 2;
      p.theta_rot = t;
      if (std::abs(simo_fading_coeff(p)) > 1e-9) continue;
      const auto ix = static_cast<std::size_t>(std::lround((t + pi) / step));
      const auto iy = static_cast<std::size_t>(std::lround((b + pi) / step));
      max_at_zeros = std::max(max_at_zeros, m.at(iy, ix));
    }
  CHECK(max_at_zeros < 0.1);
  CHECK(*std::max_element(m.value.begin(), m.value.end()) > 1.0);

  FadingMapSpec spec2 = spec;
  spec2.alpha = 0.15;
  const FadingMap m2 = fading_map(spec2);
  CHECK_FALSE(m2.analytic);
  double diff = 0.0;
  for (std::size_t k = 0; k < m.value.size(); ++k) diff = std::max(diff, std::abs(m.value[k] - m2.value[k]));
  CHECK(diff > 0.1);

  FadingMapSpec spec3 = spec;
  spec3.theta_misalign = 0.4;
  const FadingMap det = mimo_fading_map(spec3);
  for (double v : det.value) REQUIRE(v == doctest::Approx(1.0).epsilon(1e-12));

  FadingMapSpec bad = spec;
  bad.x_axis = bad.y_axis;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(fading_axis_from_string(to_string(FadingAxis::gamma)) == FadingAxis::gamma);
  CHECK_THROWS_AS(fading_axis_from_string("delta"), std::invalid_argument);
}

TEST_CASE("SIMO phase bias follows the coupling coefficient") {
  Rng rng = substream(6, Stream::trajectory);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int k = 0; k < 500; ++k) {
    const PolarizationParams p = draw_haar_params(rng);
    FiberSegment seg;
    seg.unitary = unitary_from_params(p);
    seg.phasor = std::polar(0.8, u(rng));
    seg.attenuation = 0.9;
    const double alpha = 0.03, theta = 0.2;
    const JonesMatrix h = backscatter_matrix(seg, reflection_matrix(alpha), rotation(theta));
    const cdouble c = simo_coupling(p, alpha, theta);
    if (std::abs(c) < 1e-6) continue;
    const double expect = std::arg(seg.phasor) + std::arg(c);
    REQUIRE(mod_distance(phase_simo(h.xx, h.yx).phase, expect, 2 * pi) < 1e-9);
  }
}

TEST_CASE("flag rates follow the number of observed entries") {
  Rng rng = substream(7, Stream::trajectory);
  std::normal_distribution<double> n01;
  const double thr = 0.1;
  std::size_t siso = 0, simo = 0, mimo = 0;
  constexpr std::size_t draws = 100000;
  for (std::size_t k = 0; k < draws; ++k) {
    FiberSegment seg;
    seg.unitary = sample_haar(rng).second;
    seg.phasor = cdouble(n01(rng), n01(rng)) / std::sqrt(2.0);
    const JonesMatrix h = backscatter_matrix(seg, JonesMatrix::identity(), JonesMatrix::identity());
    siso += phase_siso(h.xx, thr).flagged;
    simo += phase_simo(h.xx, h.yx, thr).flagged;
    mimo += phase_mimo(h, thr).flagged;
  }
  CHECK(siso > simo);
  CHECK(simo > mimo);
  // |det H|^(1/2) = |p| with |p|^2 exponential
  CHECK(static_cast<double>(mimo) / draws == doctest::Approx(1.0 - std::exp(-thr * thr)).epsilon(0.1));
}

TEST_CASE("sinusoidal strain appears at its frequency") {
  FiberConfig fc;
  fc.length_m = 200.0;
  fc.beat_length_m = 2.0;
  const auto h = dual_pass_response(synthesize(fc), 0.0, 0.0);
  ProbeConfig cfg;
  cfg.scheme = Scheme::mimo;
  cfg.code_log2_length = 10;
  cfg.frames = 512;
  const Probe probe = build_probe_for(cfg, h.size(), 2.0);
  const double period = probe.layout.frame_period();

  StrainEvent ev;
  ev.segment_index = 50;
  ev.displacement_m.resize(cfg.frames);
  for (std::size_t t = 0; t < cfg.frames; ++t)
    ev.displacement_m[t] = 1e-8 * std::sin(2 * pi * 100.0 * static_cast<double>(t) * period);
  const std::vector<StrainEvent> events{ev};

  Rng laser = substream(3, Stream::laser), rx = substream(3, Stream::rx);
  const ChannelEstimate est = fast_channel_sim(h, probe, laser, rx, events);
  PhaseTraceSet set = differential_phase(extract_phases(est), 1, 2.0);
  unwrap_traces(set);
  const auto &series = set.phase[48];

  double best = 0.0;
  std::size_t best_bin = 0;
  const std::size_t n = series.size();
  for (std::size_t b = 1; b < n / 2; ++b) {
    cdouble acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += series[t] * std::polar(1.0, -2 * pi * double(b * t) / double(n));
    if (std::abs(acc) > best) best = std::abs(acc), best_bin = b;
  }
  const double bin_hz = 1.0 / (period * static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(best_bin) * bin_hz - 100.0) <= bin_hz);
  const double amp = 2.0 * best / static_cast<double>(n);
  CHECK(amp == doctest::Approx(2 * strain_phase_single(1e-8, 1.468, 0.79, 1550e-9))
                   .epsilon(0.2));
}
