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

#include "mimosense/interrogation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mimosense/error.hpp"

namespace mimosense {

namespace {

constexpr std::size_t kDualInputSlots = 4;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<JonesMatrix> frame_responses(std::span<const JonesMatrix> responses, std::span<const StrainEvent> strain,
                                         std::size_t frame) {
  std::vector<JonesMatrix> out(responses.begin(), responses.end());
  if (!strain.empty()) apply_strain(out, strain, frame);
  return out;
}

} // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
  case Scheme::siso: return "SISO";
  case Scheme::simo: return "SIMO";
  case Scheme::miso: return "MISO";
  case Scheme::mimo: return "MIMO";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  const std::string n = lower(name);
  if (n == "siso") return Scheme::siso;
  if (n == "simo") return Scheme::simo;
  if (n == "miso") return Scheme::miso;
  if (n == "mimo") return Scheme::mimo;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

double ProbeConfig::launch_power_mw() const { return std::pow(10.0, launch_power_dbm / 10.0); }

void ProbeConfig::validate() const {
  if (code_log2_length < 1 || code_log2_length > 24) throw std::invalid_argument("code_log2_length must be in [1, 24]");
  if (!(symbol_rate_baud > 0.0)) throw std::invalid_argument("symbol rate must be > 0");
  if (!std::isfinite(launch_power_dbm)) throw std::invalid_argument("launch power must be finite");
  if (!(laser_linewidth_hz >= 0.0)) throw std::invalid_argument("laser linewidth must be >= 0");
  if (!(rx_noise_sigma_v >= 0.0)) throw std::invalid_argument("receiver noise must be >= 0");
  if (!(rx_volts_per_field > 0.0)) throw std::invalid_argument("rx_volts_per_field must be > 0");
  if (!(group_index > 0.0)) throw std::invalid_argument("group index must be > 0");
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
}

GolayPair golay_pair(int log2_len) {
  if (log2_len <= 0) throw std::invalid_argument("Golay log2 length must be >= 1");
  if (log2_len > 30) throw std::invalid_argument("Golay log2 length too large");
  GolayPair p{{1}, {1}};
  for (int k = 0; k < log2_len; ++k) {
    std::vector<std::int8_t> a2(p.a), b2(p.a);
    a2.insert(a2.end(), p.b.begin(), p.b.end());
    for (std::int8_t v : p.b) b2.push_back(static_cast<std::int8_t>(-v));
    p.a = std::move(a2);
    p.b = std::move(b2);
  }
  return p;
}

std::vector<std::int64_t> aperiodic_autocorrelation(std::span<const std::int8_t> seq) {
  const std::size_t n = seq.size();
  if (n == 0) return {};
  std::vector<std::int64_t> out(2 * n - 1, 0);
  for (std::size_t lag = 0; lag < n; ++lag) {
    std::int64_t acc = 0;
    for (std::size_t k = 0; k + lag < n; ++k) acc += std::int64_t{seq[k]} * seq[k + lag];
    out[n - 1 + lag] = acc;
    out[n - 1 - lag] = acc;
  }
  return out;
}

TapGrid make_tap_grid(const ProbeConfig &cfg, std::size_t segments, double segment_length_m) {
  const double tap_spacing = kSpeedOfLight / (2.0 * cfg.group_index * cfg.symbol_rate_baud);
  const double ratio = segment_length_m / tap_spacing;
  return {segments, static_cast<std::size_t>(std::max(1.0, std::round(ratio)))};
}

Probe build_probe(const ProbeConfig &cfg, const GolayPair &pair, const TapGrid &grid) {
  cfg.validate();
  if (pair.a.size() != pair.b.size() || pair.a.empty()) throw std::invalid_argument("malformed Golay pair");

  Probe p;
  p.cfg = cfg;
  p.pair = pair;
  p.layout.code_length = pair.size();
  p.layout.grid = grid;
  p.layout.guard = grid.max_delay();
  p.layout.symbol_period = cfg.symbol_period();

  const double power = cfg.launch_power_mw();
  if (dual_input(cfg.scheme)) {
    p.layout.subframes = kDualInputSlots;
    p.slot_code = {0, 1, 0, 1};
    p.slot_sign_x = {1, 1, 1, 1};
    p.slot_sign_y = {1, 1, -1, -1};
    p.amplitude = std::sqrt(power / 2.0);
  } else {
    p.layout.subframes = cfg.equalize_frame_period ? kDualInputSlots : 2;
    for (std::size_t q = 0; q < p.layout.subframes; ++q) {
      p.slot_code.push_back(static_cast<std::uint8_t>(q % 2));
      p.slot_sign_x.push_back(1);
      p.slot_sign_y.push_back(0);
    }
    p.amplitude = std::sqrt(power);
  }

  const std::size_t slot = p.layout.slot_length();
  p.x.assign(p.layout.frame_symbols(), cdouble{});
  p.y.assign(p.layout.frame_symbols(), cdouble{});
  for (std::size_t q = 0; q < p.layout.subframes; ++q) {
    const auto &code = p.slot_code[q] == 0 ? pair.a : pair.b;
    for (std::size_t n = 0; n < code.size(); ++n) {
      p.x[q * slot + n] = p.amplitude * p.slot_sign_x[q] * code[n];
      p.y[q * slot + n] = p.amplitude * p.slot_sign_y[q] * code[n];
    }
  }
  return p;
}

Probe build_probe_for(const ProbeConfig &cfg, std::size_t segments, double segment_length_m) {
  cfg.validate();
  return build_probe(cfg, golay_pair(cfg.code_log2_length), make_tap_grid(cfg, segments, segment_length_m));
}

double Probe::estimate_noise_variance() const {
  const double sigma = cfg.field_noise_sigma();
  const double complex_var = 2.0 * sigma * sigma;
  return complex_var /
         (static_cast<double>(layout.subframes) * static_cast<double>(layout.code_length) * amplitude * amplitude);
}

std::vector<double> wiener_phase(double linewidth_hz, double sample_period_s, std::size_t n_samples, Rng &rng) {
  if (!(linewidth_hz >= 0.0)) throw std::invalid_argument("linewidth must be >= 0");
  std::vector<double> phase(n_samples, 0.0);
  if (linewidth_hz == 0.0 || n_samples == 0) return phase;
  std::normal_distribution<double> step(0.0, std::sqrt(2.0 * std::numbers::pi * linewidth_hz * sample_period_s));
  double acc = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    acc += step(rng);
    phase[k] = acc;
  }
  return phase;
}

std::size_t waveform_memory_estimate(const Probe &probe) {
  const std::size_t samples = probe.cfg.frames * probe.layout.frame_symbols();
  const std::size_t outputs = dual_output(probe.cfg.scheme) ? 2 : 1;
  // received outputs + laser phase path + per-frame scratch
  return samples * (outputs * sizeof(cdouble) + sizeof(double)) + 4 * probe.layout.frame_symbols() * sizeof(cdouble);
}

ReceivedWaveform simulate_backscatter(std::span<const JonesMatrix> responses, const Probe &probe, Rng &laser_rng,
                                      Rng &rx_rng, std::span<const StrainEvent> strain) {
  const ProbeLayout &lay = probe.layout;
  if (responses.size() != lay.grid.segments)
    throw std::invalid_argument("response count does not match the probe tap grid");
  const std::size_t need = waveform_memory_estimate(probe);
  if (need > probe.cfg.memory_budget_bytes) {
    std::ostringstream msg;
    msg << "waveform simulation needs ~" << (need >> 20) << " MiB (" << probe.cfg.frames << " frames x "
        << lay.frame_symbols() << " symbols), budget is " << (probe.cfg.memory_budget_bytes >> 20)
        << " MiB; reduce frames or use the fast path";
    throw ResourceBudgetError(msg.str());
  }

  const Scheme scheme = probe.cfg.scheme;
  const bool two_in = dual_input(scheme);
  const bool two_out = dual_output(scheme);
  const std::size_t fl = lay.frame_symbols();
  const std::size_t slot = lay.slot_length();
  const std::size_t total = probe.cfg.frames * fl;

  ReceivedWaveform rw;
  rw.scheme = scheme;
  rw.frames = probe.cfg.frames;
  rw.frame_symbols = fl;
  rw.x.assign(total, cdouble{});
  if (two_out) rw.y.assign(total, cdouble{});

  const std::vector<double> phi = wiener_phase(probe.cfg.laser_linewidth_hz, lay.symbol_period, total, laser_rng);
  const bool phase_noise = probe.cfg.laser_linewidth_hz > 0.0;

  std::vector<cdouble> ux(fl), uy(fl);
  for (std::size_t f = 0; f < probe.cfg.frames; ++f) {
    const std::size_t base = f * fl;
    for (std::size_t k = 0; k < fl; ++k) {
      const cdouble lo = phase_noise ? std::polar(1.0, phi[base + k]) : cdouble{1.0};
      ux[k] = probe.x[k] * lo;
      uy[k] = probe.y[k] * lo;
    }
    const std::vector<JonesMatrix> h = frame_responses(responses, strain, f);
    cdouble *rx = rw.x.data() + base;
    cdouble *ry = two_out ? rw.y.data() + base : nullptr;
    for (std::size_t i = 1; i <= lay.grid.segments; ++i) {
      const JonesMatrix &m = h[i - 1];
      const std::size_t d = lay.grid.delay(i);
      for (std::size_t q = 0; q < lay.subframes; ++q) {
        const std::size_t k0 = q * slot;
        const std::size_t k1 = k0 + lay.code_length;
        if (two_in) {
          for (std::size_t k = k0; k < k1; ++k) {
            rx[k + d] += m.xx * ux[k] + m.xy * uy[k];
            if (ry) ry[k + d] += m.yx * ux[k] + m.yy * uy[k];
          }
        } else {
          for (std::size_t k = k0; k < k1; ++k) {
            rx[k + d] += m.xx * ux[k];
            if (ry) ry[k + d] += m.yx * ux[k];
          }
        }
      }
    }
    if (phase_noise) {
      for (std::size_t k = 0; k < fl; ++k) {
        const cdouble lo = std::polar(1.0, -phi[base + k]);
        rx[k] *= lo;
        if (ry) ry[k] *= lo;
      }
    }
  }

  const double sigma = probe.cfg.field_noise_sigma();
  if (sigma > 0.0) {
    std::normal_distribution<double> g(0.0, sigma);
    for (cdouble &v : rw.x) v += cdouble{g(rx_rng), g(rx_rng)};
    for (cdouble &v : rw.y) v += cdouble{g(rx_rng), g(rx_rng)};
  }
  return rw;
}

ChannelEstimate::ChannelEstimate(Scheme scheme, std::size_t frames, std::size_t segments, double frame_period)
    : scheme_(scheme), frames_(frames), segments_(segments), frame_period_(frame_period),
      data_(frames * segments, JonesMatrix::zero()) {}

void ChannelEstimate::mask_unobserved() {
  for (JonesMatrix &m : data_) {
    if (!dual_input(scheme_)) m.xy = m.yy = 0.0;
    if (!dual_output(scheme_)) m.yx = m.yy = 0.0;
  }
}

ChannelEstimate estimate_channel(const ReceivedWaveform &received, const Probe &probe) {
  const ProbeLayout &lay = probe.layout;
  const std::size_t fl = lay.frame_symbols();
  if (received.frame_symbols != fl || received.x.size() != received.frames * fl)
    throw std::invalid_argument("received waveform is not aligned to the probe frame");
  if (received.scheme != probe.cfg.scheme) throw std::invalid_argument("received waveform scheme mismatch");
  const bool two_out = dual_output(received.scheme);
  if (two_out && received.y.size() != received.x.size())
    throw std::invalid_argument("received Y output length mismatch");

  const std::size_t taps = lay.grid.max_delay();
  const std::size_t slot = lay.slot_length();
  const std::size_t lc = lay.code_length;
  const std::size_t outputs = two_out ? 2 : 1;
  const double norm = 1.0 / (static_cast<double>(lay.subframes) * static_cast<double>(lc) * probe.amplitude);

  ChannelEstimate est(received.scheme, received.frames, lay.grid.segments, lay.frame_period());
  // corr[slot][output][tap], taps 1..max_delay
  std::vector<cdouble> corr(lay.subframes * outputs * (taps + 1));
  auto corr_at = [&](std::size_t q, std::size_t o, std::size_t d) -> cdouble & {
    return corr[(q * outputs + o) * (taps + 1) + d];
  };

  for (std::size_t f = 0; f < received.frames; ++f) {
    for (std::size_t q = 0; q < lay.subframes; ++q) {
      const auto &code = probe.slot_code[q] == 0 ? probe.pair.a : probe.pair.b;
      for (std::size_t o = 0; o < outputs; ++o) {
        const cdouble *r = (o == 0 ? received.x.data() : received.y.data()) + f * fl + q * slot;
        for (std::size_t d = 1; d <= taps; ++d) {
          double re = 0.0, im = 0.0;
          const cdouble *w = r + d;
          for (std::size_t n = 0; n < lc; ++n) {
            re += code[n] * w[n].real();
            im += code[n] * w[n].imag();
          }
          corr_at(q, o, d) = {re, im};
        }
      }
    }
    for (std::size_t i = 1; i <= lay.grid.segments; ++i) {
      JonesMatrix h = JonesMatrix::zero();
      for (std::size_t d = lay.grid.delay(i - 1) + 1; d <= lay.grid.delay(i); ++d) {
        for (std::size_t o = 0; o < outputs; ++o) {
          cdouble col_x{}, col_y{};
          for (std::size_t q = 0; q < lay.subframes; ++q) {
            col_x += static_cast<double>(probe.slot_sign_x[q]) * corr_at(q, o, d);
            col_y += static_cast<double>(probe.slot_sign_y[q]) * corr_at(q, o, d);
          }
          if (o == 0) {
            h.xx += col_x * norm;
            h.xy += col_y * norm;
          } else {
            h.yx += col_x * norm;
            h.yy += col_y * norm;
          }
        }
      }
      est.at(f, i - 1) = h;
    }
  }
  est.mask_unobserved();
  return est;
}

ChannelEstimate fast_channel_sim(std::span<const JonesMatrix> responses, const Probe &probe, Rng &laser_rng,
                                 Rng &rx_rng, std::span<const StrainEvent> strain) {
  const ProbeLayout &lay = probe.layout;
  const std::size_t n = lay.grid.segments;
  if (responses.size() != n) throw std::invalid_argument("response count does not match the probe tap grid");

  const Scheme scheme = probe.cfg.scheme;
  ChannelEstimate est(scheme, probe.cfg.frames, n, lay.frame_period());

  const double dnu = probe.cfg.laser_linewidth_hz;
  const double two_pi_dnu_t = 2.0 * std::numbers::pi * dnu * lay.symbol_period;
  std::normal_distribution<double> seg_step(0.0, std::sqrt(two_pi_dnu_t * static_cast<double>(lay.grid.taps_per_segment)));
  const std::size_t fl = lay.frame_symbols();
  const std::size_t span_taps = lay.grid.max_delay();
  std::normal_distribution<double> gap_step(0.0, std::sqrt(two_pi_dnu_t * static_cast<double>(fl - span_taps)));

  const double entry_var = probe.estimate_noise_variance() * static_cast<double>(lay.grid.taps_per_segment);
  const double sigma_q = std::sqrt(entry_var / 2.0);
  std::normal_distribution<double> noise(0.0, sigma_q > 0.0 ? sigma_q : 1.0);
  const bool noisy = sigma_q > 0.0;
  const bool two_in = dual_input(scheme), two_out = dual_output(scheme);
  auto draw = [&]() { return cdouble{noise(rx_rng), noise(rx_rng)}; };

  // Wiener samples at t_f - tau_i for i = N..0; w[i] holds W(t_f - tau_i).
  std::vector<double> w(n + 1, 0.0);
  double level = 0.0;
  for (std::size_t f = 0; f < probe.cfg.frames; ++f) {
    if (dnu > 0.0) {
      if (f > 0) level += gap_step(laser_rng);
      w[n] = level;
      for (std::size_t i = n; i-- > 0;) {
        level += seg_step(laser_rng);
        w[i] = level;
      }
    }
    const std::vector<JonesMatrix> h = frame_responses(responses, strain, f);
    for (std::size_t i = 1; i <= n; ++i) {
      JonesMatrix m = dnu > 0.0 ? std::polar(1.0, w[i] - w[0]) * h[i - 1] : h[i - 1];
      if (noisy) {
        m.xx += draw();
        if (two_in) m.xy += draw();
        if (two_out) m.yx += draw();
        if (two_in && two_out) m.yy += draw();
      }
      est.at(f, i - 1) = m;
    }
  }
  est.mask_unobserved();
  return est;
}

} // namespace mimosense
