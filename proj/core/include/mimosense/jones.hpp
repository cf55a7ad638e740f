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

#include <complex>
#include <utility>

#include "mimosense/rng.hpp"

namespace mimosense {

using cdouble = std::complex<double>;

/// 2x2 complex operator acting on Jones vectors. Entries are named by
/// (output, input) polarization: `xy` couples the y input into the x output.
struct JonesMatrix {
  cdouble xx{1.0}, xy{0.0}, yx{0.0}, yy{1.0};

  static JonesMatrix identity() { return {}; }
  static JonesMatrix zero() { return {0.0, 0.0, 0.0, 0.0}; }

  JonesMatrix transpose() const { return {xx, yx, xy, yy}; }
  JonesMatrix adjoint() const { return {std::conj(xx), std::conj(yx), std::conj(xy), std::conj(yy)}; }
  cdouble det() const { return xx * yy - xy * yx; }
  cdouble trace() const { return xx + yy; }

  /// Largest entry modulus.
  double max_abs() const;
  /// Squared Frobenius norm.
  double norm2() const { return std::norm(xx) + std::norm(xy) + std::norm(yx) + std::norm(yy); }
  /// max |(H H^dagger - I)_kl|
  double unitarity_error() const;
  bool is_finite() const;

  friend JonesMatrix operator*(const JonesMatrix &a, const JonesMatrix &b) {
    return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
            a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
  }
  friend JonesMatrix operator*(cdouble s, const JonesMatrix &a) { return {s * a.xx, s * a.xy, s * a.yx, s * a.yy}; }
  friend JonesMatrix operator+(const JonesMatrix &a, const JonesMatrix &b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yx + b.yx, a.yy + b.yy};
  }
  friend JonesMatrix operator-(const JonesMatrix &a, const JonesMatrix &b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy};
  }
  friend bool operator==(const JonesMatrix &, const JonesMatrix &) = default;
};

struct JonesVector {
  cdouble x{1.0}, y{0.0};

  double power() const { return std::norm(x) + std::norm(y); }

  friend JonesVector operator*(const JonesMatrix &m, const JonesVector &v) {
    return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y};
  }
  friend JonesVector operator*(cdouble s, const JonesVector &v) { return {s * v.x, s * v.y}; }
};

/// Max-entry distance between two matrices.
double max_abs_diff(const JonesMatrix &a, const JonesMatrix &b);

/// Birefringence parameters of one fibre section: U = e^{j phi} D(beta) R(theta) D(gamma).
///
/// `theta_unfolded` carries the accumulated rotation angle of a slowly evolving
/// section before it is folded back into [0, pi/2]; for freshly sampled
/// parameters it equals `theta_rot`.
struct PolarizationParams {
  double beta{0.0};
  double gamma{0.0};
  double theta_rot{0.0};
  double common_phase{0.0};
  double theta_unfolded{0.0};
};

/// Stokes parameters; s1..s3 share the units of s0.
struct StokesVector {
  double s0{0.0}, s1{0.0}, s2{0.0}, s3{0.0};

  double polarized_norm() const;
};

/// diag(e^{j angle}, e^{-j angle}). Throws std::invalid_argument on non-finite input.
JonesMatrix phase_retarder(double angle);

/// Real rotation [[cos, -sin], [sin, cos]].
JonesMatrix rotation(double angle);

/// Reflection with polarization transfer `alpha` (fraction of power moved to the
/// orthogonal state). alpha < 0 throws; alpha above the physical range (0.05)
/// is accepted and reported once through the library log.
JonesMatrix reflection_matrix(double alpha);

/// Builds e^{j phi} D(beta) R(theta_rot) D(gamma) from the parameters.
JonesMatrix unitary_from_params(const PolarizationParams &p);

/// Uniform parameters of a random SU(2) element: beta, gamma ~ U[-pi, pi],
/// theta = asin(sqrt(xi)) with xi ~ U[0, 1]; common phase fixed to 0.
PolarizationParams draw_haar_params(Rng &rng);

/// Haar-distributed SU(2) matrix together with the parameters that produced it.
std::pair<PolarizationParams, JonesMatrix> sample_haar(Rng &rng);

/// One step of slow birefringence drift over a section of length ratio
/// L_s / L_pb. Each parameter moves by ratio * (fresh draw); beta and gamma
/// wrap to [-pi, pi], theta is folded by reflection into [0, pi/2]. A ratio of
/// one or more returns an independent fresh draw.
PolarizationParams evolve_params(const PolarizationParams &prev, double ratio, Rng &rng);

/// Stokes projection, s3 = -2 Im(x y*) (right-circular positive).
StokesVector jones_to_stokes(const JonesVector &v);

/// Wraps an angle into [-pi, pi].
double wrap_pi(double angle);

/// Folds an angle into [0, pi/2] by reflection at both ends (triangle wave).
double fold_quarter_turn(double angle);

} // namespace mimosense
