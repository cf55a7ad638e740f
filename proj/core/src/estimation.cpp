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

#include "mimosense/estimation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mimosense {

namespace {

constexpr double kPi = std::numbers::pi;

PhaseSample from_argument(cdouble z, double threshold) {
  if (!(std::abs(z) > threshold)) return {0.0, true};
  return {std::arg(z), false};
}

} // namespace

PhaseSample phase_mimo(const JonesMatrix &h, double threshold) {
  const cdouble d = h.det();
  if (!(std::sqrt(std::abs(d)) > threshold)) return {0.0, true};
  // arg in (-pi, pi], half of it in (-pi/2, pi/2]
  return {0.5 * std::arg(d), false};
}

PhaseSample phase_simo(cdouble hxx, cdouble hyx, double threshold) { return from_argument(hxx + hyx, threshold); }

PhaseSample phase_siso(cdouble hxx, double threshold) { return from_argument(hxx, threshold); }

PhaseSample phase_miso(cdouble hxx, cdouble hxy, double threshold) { return from_argument(hxx + hxy, threshold); }

PhaseSample estimate_phase(Scheme scheme, const JonesMatrix &h, double threshold) {
  switch (scheme) {
  case Scheme::siso: return phase_siso(h.xx, threshold);
  case Scheme::simo: return phase_simo(h.xx, h.yx, threshold);
  case Scheme::miso: return phase_miso(h.xx, h.xy, threshold);
  case Scheme::mimo: return phase_mimo(h, threshold);
  }
  return {0.0, true};
}

double phase_modulus(Scheme scheme) { return scheme == Scheme::mimo ? kPi : 2.0 * kPi; }

double wrap_modulus(double x, double modulus) {
  double r = std::remainder(x, modulus);
  if (r <= -0.5 * modulus) r += modulus;
  return r;
}

PhaseTraces extract_phases(const ChannelEstimate &est, double threshold) {
  PhaseTraces tr;
  tr.scheme = est.scheme();
  tr.frames = est.frames();
  tr.segments = est.segments();
  tr.frame_period = est.frame_period();
  tr.phase.assign(tr.frames * tr.segments, 0.0);
  tr.flagged.assign(tr.frames * tr.segments, 0);
  for (std::size_t t = 0; t < tr.frames; ++t) {
    for (std::size_t i = 0; i < tr.segments; ++i) {
      const PhaseSample s = estimate_phase(tr.scheme, est.at(t, i), threshold);
      tr.phase[i * tr.frames + t] = s.phase;
      tr.flagged[i * tr.frames + t] = s.flagged ? 1 : 0;
    }
  }
  return tr;
}

PhaseTraceSet differential_phase(const PhaseTraces &traces, std::size_t gauge_segments, double segment_length_m) {
  if (gauge_segments == 0) throw std::invalid_argument("gauge must be at least one segment");
  if (gauge_segments >= traces.segments)
    throw std::invalid_argument("gauge of " + std::to_string(gauge_segments) + " segments does not fit a fibre of " +
                                std::to_string(traces.segments) + " segments");

  PhaseTraceSet set;
  set.frames = traces.frames;
  set.gauge_segments = gauge_segments;
  set.frame_period = traces.frame_period;
  set.segment_length_m = segment_length_m;
  set.modulus = traces.modulus();
  const std::size_t n = traces.segments;
  set.phase.resize(n - 1);
  set.flagged.resize(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t ref = k > gauge_segments ? k - gauge_segments : 0;
    auto &out = set.phase[k - 1];
    auto &fl = set.flagged[k - 1];
    out.resize(traces.frames);
    fl.resize(traces.frames);
    for (std::size_t t = 0; t < traces.frames; ++t) {
      const std::size_t a = k * traces.frames + t, b = ref * traces.frames + t;
      out[t] = wrap_modulus(traces.phase[a] - traces.phase[b], set.modulus);
      fl[t] = (traces.flagged[a] || traces.flagged[b]) ? 1 : 0;
    }
  }
  return set;
}

std::vector<double> unwrap_time(std::span<const double> series, double modulus, std::span<const std::uint8_t> skip) {
  std::vector<double> out(series.begin(), series.end());
  const bool use_skip = !skip.empty();
  if (use_skip && skip.size() != series.size()) throw std::invalid_argument("skip mask length mismatch");
  double offset = 0.0;
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    double v = series[n] + offset;
    if (use_skip && skip[n]) {
      out[n] = v;
      continue;
    }
    if (have_prev) {
      const double d = v - prev;
      if (std::abs(d) > 0.5 * modulus) {
        const double k = std::round(d / modulus);
        offset -= k * modulus;
        v = series[n] + offset;
      }
    }
    out[n] = v;
    prev = v;
    have_prev = true;
  }
  return out;
}

void unwrap_traces(PhaseTraceSet &set) {
  for (std::size_t k = 0; k < set.size(); ++k) set.phase[k] = unwrap_time(set.phase[k], set.modulus, set.flagged[k]);
}

std::vector<double> highpass(std::span<const double> x, double cutoff_hz, double sample_period_s) {
  std::vector<double> y(x.begin(), x.end());
  if (cutoff_hz <= 0.0 || x.empty()) return y;
  if (!(sample_period_s > 0.0)) throw std::invalid_argument("sample period must be > 0");
  const double rc = 1.0 / (2.0 * kPi * cutoff_hz);
  const double a = rc / (rc + sample_period_s);
  y[0] = 0.0;
  for (std::size_t n = 1; n < x.size(); ++n) y[n] = a * (y[n - 1] + x[n] - x[n - 1]);
  return y;
}

double masked_stdv(std::span<const double> x, std::span<const std::uint8_t> skip) {
  const bool use_skip = !skip.empty();
  std::size_t count = 0;
  double ref = 0.0, s = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (use_skip && skip[n]) continue;
    if (count == 0) ref = x[n];
    const double d = x[n] - ref;
    s += d;
    s2 += d * d;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double c = static_cast<double>(count);
  const double var = (s2 - s * s / c) / (c - 1.0);
  return std::sqrt(std::max(var, 0.0));
}

double snr_phase_db(double stdv) {
  if (std::isnan(stdv)) return stdv;
  if (stdv < kSnrCapStdv) return kSnrCapDb;
  return 10.0 * std::log10(1.0 / (stdv * stdv));
}

StdvProfile stdv_profile(const PhaseTraceSet &set, double window_s, double highpass_hz) {
  if (window_s < 0.0) throw std::invalid_argument("window must be >= 0");
  std::size_t used = set.frames;
  if (window_s > 0.0) {
    const double duration = static_cast<double>(set.frames) * set.frame_period;
    if (window_s > duration * (1.0 + 1e-12))
      throw std::invalid_argument("window of " + std::to_string(window_s) + " s exceeds the trace duration of " +
                                  std::to_string(duration) + " s");
    used = std::min<std::size_t>(set.frames, static_cast<std::size_t>(std::floor(window_s / set.frame_period + 1e-9)));
  }

  StdvProfile prof;
  prof.frames_used = used;
  const std::size_t n = set.size();
  prof.segment_index.resize(n);
  prof.distance_m.resize(n);
  prof.stdv_rad.resize(n);
  prof.snr_db.resize(n);
  prof.flagged_fraction.resize(n);
  prof.capped.resize(n);

  std::vector<double> held(used);
  for (std::size_t k = 0; k < n; ++k) {
    const auto &ph = set.phase[k];
    const auto &fl = set.flagged[k];
    // flagged samples hold the nearest earlier valid value (the first valid
    // one before any) so the filter sees no step
    std::size_t flagged = 0;
    double last = 0.0;
    for (std::size_t t = 0; t < used; ++t) {
      if (!fl[t]) {
        last = ph[t];
        break;
      }
    }
    for (std::size_t t = 0; t < used; ++t) {
      if (fl[t])
        ++flagged;
      else
        last = ph[t];
      held[t] = last;
    }

    const std::vector<double> filtered = highpass(held, highpass_hz, set.frame_period);
    const double sd = masked_stdv(filtered, std::span<const std::uint8_t>(fl).first(used));

    prof.segment_index[k] = k + 2;
    prof.distance_m[k] = static_cast<double>(k + 2) * set.segment_length_m;
    prof.stdv_rad[k] = sd;
    prof.snr_db[k] = snr_phase_db(sd);
    prof.capped[k] = (!std::isnan(sd) && sd < kSnrCapStdv) ? 1 : 0;
    prof.flagged_fraction[k] = used ? static_cast<double>(flagged) / static_cast<double>(used) : 0.0;
  }
  return prof;
}

StdvProfile profile_from_estimate(const ChannelEstimate &est, double segment_length_m, const PhaseProcessing &proc) {
  PhaseTraceSet set = differential_phase(extract_phases(est, proc.flag_threshold), proc.gauge_segments,
                                         segment_length_m);
  unwrap_traces(set);
  return stdv_profile(set, proc.window_s, proc.highpass_hz);
}

cdouble simo_fading_coeff(const PolarizationParams &p) {
  const cdouble e2g = std::polar(1.0, 2.0 * p.gamma);
  const cdouble j{0.0, 1.0};
  return e2g * std::cos(2.0 * p.beta) -
         j * std::sin(2.0 * p.beta) * (e2g * std::cos(2.0 * p.theta_rot) + std::sin(2.0 * p.theta_rot));
}

cdouble simo_coupling(const PolarizationParams &p, double alpha, double theta_misalign) {
  PolarizationParams q = p;
  q.common_phase = 0.0;
  const JonesMatrix u = unitary_from_params(q);
  const JonesMatrix h = u.transpose() * reflection_matrix(alpha) * u * rotation(theta_misalign);
  return h.xx + h.yx;
}

std::string_view to_string(FadingAxis a) {
  switch (a) {
  case FadingAxis::beta: return "beta";
  case FadingAxis::gamma: return "gamma";
  case FadingAxis::theta_rot: return "Theta";
  }
  return "?";
}

FadingAxis fading_axis_from_string(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "beta") return FadingAxis::beta;
  if (n == "gamma") return FadingAxis::gamma;
  if (n == "theta" || n == "theta_rot") return FadingAxis::theta_rot;
  throw std::invalid_argument("unknown fading-map axis '" + std::string(name) + "'");
}

void FadingMapSpec::validate() const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("fading map grid needs at least 2 points per axis");
  if (x_axis == y_axis) throw std::invalid_argument("fading map axes must differ");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) || !std::isfinite(y_max))
    throw std::invalid_argument("fading map ranges must be finite");
  if (!(alpha >= 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
}

namespace {

void set_axis(PolarizationParams &p, FadingAxis axis, double v) {
  switch (axis) {
  case FadingAxis::beta: p.beta = v; break;
  case FadingAxis::gamma: p.gamma = v; break;
  case FadingAxis::theta_rot: p.theta_rot = v; break;
  }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

template <class F> FadingMap grid_map(const FadingMapSpec &spec, F &&f) {
  spec.validate();
  FadingMap m;
  m.x = linspace(spec.x_min, spec.x_max, spec.nx);
  m.y = linspace(spec.y_min, spec.y_max, spec.ny);
  m.value.resize(spec.nx * spec.ny);
  for (std::size_t iy = 0; iy < spec.ny; ++iy) {
    for (std::size_t ix = 0; ix < spec.nx; ++ix) {
      PolarizationParams p = spec.fixed;
      p.common_phase = 0.0;
      set_axis(p, spec.y_axis, m.y[iy]);
      set_axis(p, spec.x_axis, m.x[ix]);
      m.value[iy * spec.nx + ix] = f(p);
    }
  }
  return m;
}

} // namespace

FadingMap fading_map(const FadingMapSpec &spec) {
  const bool analytic = spec.alpha == 0.0 && spec.theta_misalign == 0.0;
  FadingMap m = grid_map(spec, [&](const PolarizationParams &p) {
    if (analytic) return std::abs(simo_fading_coeff(p));
    PolarizationParams q = p;
    q.beta = -p.beta;
    q.theta_rot = -p.theta_rot;
    return std::abs(simo_coupling(q, spec.alpha, spec.theta_misalign));
  });
  m.analytic = analytic;
  return m;
}

FadingMap mimo_fading_map(const FadingMapSpec &spec) {
  const JonesMatrix mr = reflection_matrix(spec.alpha);
  const JonesMatrix rt = rotation(spec.theta_misalign);
  FadingMap m = grid_map(spec, [&](const PolarizationParams &p) {
    const JonesMatrix u = unitary_from_params(p);
    return std::abs((u.transpose() * mr * u * rt).det());
  });
  m.analytic = false;
  return m;
}

} // namespace mimosense
