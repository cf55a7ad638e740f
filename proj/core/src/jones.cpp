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

#include "mimosense/jones.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mimosense/log.hpp"

namespace mimosense {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kAlphaModelMax = 0.05;

void require_finite(double v, const char *what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}
} // namespace

double JonesMatrix::max_abs() const {
  return std::max({std::abs(xx), std::abs(xy), std::abs(yx), std::abs(yy)});
}

double JonesMatrix::unitarity_error() const {
  const JonesMatrix g = (*this) * adjoint();
  return max_abs_diff(g, identity());
}

bool JonesMatrix::is_finite() const {
  for (cdouble v : {xx, xy, yx, yy})
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double max_abs_diff(const JonesMatrix &a, const JonesMatrix &b) { return (a - b).max_abs(); }

double StokesVector::polarized_norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }

JonesMatrix phase_retarder(double angle) {
  require_finite(angle, "retarder angle");
  const cdouble e = std::polar(1.0, angle);
  return {e, 0.0, 0.0, std::conj(e)};
}

JonesMatrix rotation(double angle) {
  require_finite(angle, "rotation angle");
  const double c = std::cos(angle), s = std::sin(angle);
  return {c, -s, s, c};
}

JonesMatrix reflection_matrix(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("reflection transfer coefficient must be finite and >= 0");
  if (alpha > 1.0) throw std::invalid_argument("reflection transfer coefficient must be <= 1");
  if (alpha > kAlphaModelMax) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      log::warn("reflection transfer coefficient " + std::to_string(alpha) +
                " exceeds the physical range [0, 0.05]");
  }
  const double d = std::sqrt(1.0 - alpha), o = std::sqrt(alpha);
  return {d, -o, o, d};
}

JonesMatrix unitary_from_params(const PolarizationParams &p) {
  JonesMatrix u = phase_retarder(p.beta) * rotation(p.theta_rot) * phase_retarder(p.gamma);
  if (p.common_phase != 0.0) u = std::polar(1.0, p.common_phase) * u;
  return u;
}

PolarizationParams draw_haar_params(Rng &rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PolarizationParams p;
  p.beta = angle(rng);
  p.gamma = angle(rng);
  p.theta_rot = std::asin(std::sqrt(unit(rng)));
  p.theta_unfolded = p.theta_rot;
  return p;
}

std::pair<PolarizationParams, JonesMatrix> sample_haar(Rng &rng) {
  PolarizationParams p = draw_haar_params(rng);
  return {p, unitary_from_params(p)};
}

PolarizationParams evolve_params(const PolarizationParams &prev, double ratio, Rng &rng) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("L_s/L_pb ratio must be >= 0");
  if (ratio == 0.0) return prev;
  if (ratio >= 1.0) return draw_haar_params(rng);
  const PolarizationParams fresh = draw_haar_params(rng);
  PolarizationParams next = prev;
  next.beta = wrap_pi(prev.beta + ratio * fresh.beta);
  next.gamma = wrap_pi(prev.gamma + ratio * fresh.gamma);
  // Reflect the accumulated path rather than each step: increments are
  // non-negative, so per-step reflection would pin theta at pi/2.
  next.theta_unfolded = std::fmod(prev.theta_unfolded + ratio * fresh.theta_rot, 2.0 * kPi);
  next.theta_rot = fold_quarter_turn(next.theta_unfolded);
  return next;
}

StokesVector jones_to_stokes(const JonesVector &v) {
  const double px = std::norm(v.x), py = std::norm(v.y);
  const cdouble cross = v.x * std::conj(v.y);
  return {px + py, px - py, 2.0 * cross.real(), -2.0 * cross.imag()};
}

double wrap_pi(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double fold_quarter_turn(double angle) {
  constexpr double half = kPi / 2.0;
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  return r <= half ? r : kPi - r;
}

} // namespace mimosense
