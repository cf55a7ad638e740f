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

#include "mimosense/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "mimosense/io.hpp"
#include "mimosense/log.hpp"
#include "mimosense/rng.hpp"

namespace mimosense {

namespace {

using nlohmann::ordered_json;

struct WorkUnit {
  std::size_t length_index;
  std::size_t fibre_index;
  std::size_t label_index;
  std::optional<Scheme> scheme; // empty for the polarization-free baseline
};

struct UnitResult {
  StdvProfile profile;
  std::uint64_t segment_frames{0};
};

std::uint64_t fibre_seed(std::uint64_t seed, std::size_t li, std::size_t fi) {
  Rng r = substream(seed, Stream::campaign, li, fi);
  return r();
}

UnitResult run_unit(const CampaignConfig &cfg, const WorkUnit &u) {
  FiberConfig fc = cfg.fiber;
  fc.length_m = cfg.lengths_m[u.length_index];
  fc.seed = fibre_seed(cfg.seed, u.length_index, u.fibre_index);
  const Scheme scheme = u.scheme.value_or(Scheme::mimo);
  if (!u.scheme) fc.polarization_enabled = false;

  const FiberRealization fib = synthesize(fc);
  const std::vector<JonesMatrix> h = dual_pass_response(fib, fc.alpha, fc.theta_misalign);

  ProbeConfig pc = cfg.probe;
  pc.scheme = scheme;
  const Probe probe = build_probe_for(pc, fib.size(), fib.segment_length_m);
  const auto stream_id = static_cast<std::uint64_t>(scheme);
  Rng laser = substream(fc.seed, Stream::laser, stream_id);
  Rng rx = substream(fc.seed, Stream::rx, stream_id);

  ChannelEstimate est;
  if (cfg.sim_path == SimPath::fast) {
    est = fast_channel_sim(h, probe, laser, rx);
  } else {
    est = estimate_channel(simulate_backscatter(h, probe, laser, rx), probe);
  }
  UnitResult res;
  res.profile = profile_from_estimate(est, fib.segment_length_m, cfg.processing);
  res.segment_frames = static_cast<std::uint64_t>(fib.size()) * pc.frames;
  return res;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string length_tag(double length_m) {
  if (std::floor(length_m) == length_m && std::abs(length_m) < 1e15)
    return std::to_string(static_cast<long long>(length_m));
  return io::format_number(length_m);
}

void finalize(EstimatorStats &es, const std::vector<const StdvProfile *> &profiles, double bin_m,
              double segment_length_m) {
  double flag_sum = 0.0;
  std::size_t flag_n = 0;
  std::size_t bins = 0;
  for (const StdvProfile *p : profiles) {
    if (!p->distance_m.empty()) {
      const double last_center = p->distance_m.back() - 0.5 * segment_length_m;
      bins = std::max(bins, static_cast<std::size_t>(std::floor(last_center / bin_m)) + 1);
    }
  }
  std::vector<double> bin_sum(bins, 0.0);
  std::vector<std::uint64_t> bin_n(bins, 0);

  for (const StdvProfile *p : profiles) {
    for (std::size_t k = 0; k < p->size(); ++k) {
      flag_sum += p->flagged_fraction[k];
      ++flag_n;
      const double sd = p->stdv_rad[k];
      if (!std::isfinite(sd)) {
        ++es.excluded;
        continue;
      }
      es.stdv.push_back(sd);
      es.snr_db.push_back(p->snr_db[k]);
      const double center = p->distance_m[k] - 0.5 * segment_length_m;
      const std::size_t b = std::min(bins - 1, static_cast<std::size_t>(std::floor(center / bin_m)));
      bin_sum[b] += sd;
      ++bin_n[b];
    }
  }
  es.mean_flagged_fraction = flag_n ? flag_sum / static_cast<double>(flag_n) : 0.0;

  const double n = static_cast<double>(es.stdv.size());
  if (!es.stdv.empty()) {
    es.mean_stdv = std::accumulate(es.stdv.begin(), es.stdv.end(), 0.0) / n;
    es.snr_mean = std::accumulate(es.snr_db.begin(), es.snr_db.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : es.snr_db) ss += (v - es.snr_mean) * (v - es.snr_mean);
    es.snr_var = es.stdv.size() > 1 ? ss / (n - 1.0) : 0.0;
    for (double q : {5.0, 25.0, 50.0, 75.0, 95.0, 99.0}) es.percentiles[q] = percentile(es.stdv, q);
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (bin_n[b] == 0) continue;
    es.curve.bin_center_m.push_back((static_cast<double>(b) + 0.5) * bin_m);
    es.curve.mean_stdv.push_back(bin_sum[b] / static_cast<double>(bin_n[b]));
    es.curve.count.push_back(bin_n[b]);
  }
}

void fill_histograms(LengthStats &ls, std::size_t bins) {
  double hi = 0.0;
  for (const EstimatorStats &es : ls.estimators)
    if (!es.stdv.empty()) hi = std::max(hi, percentile(es.stdv, 99.0));
  if (!(hi > 0.0)) hi = 1.0;
  const double w = hi / static_cast<double>(bins);
  for (EstimatorStats &es : ls.estimators) {
    Histogram &h = es.histogram;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = hi * static_cast<double>(b) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : es.stdv) {
      if (v > hi) {
        ++h.overflow;
        continue;
      }
      ++h.counts[std::min(bins - 1, static_cast<std::size_t>(v / w))];
    }
  }
}

CampaignStats aggregate(const CampaignConfig &cfg, const std::vector<WorkUnit> &units,
                        const std::vector<std::optional<UnitResult>> &results) {
  const std::vector<std::string> labels = cfg.labels();
  CampaignStats st;
  for (std::size_t li = 0; li < cfg.lengths_m.size(); ++li) {
    LengthStats ls;
    ls.length_m = cfg.lengths_m[li];
    FiberConfig fc = cfg.fiber;
    fc.length_m = ls.length_m;
    ls.segments = fc.segment_count();
    std::vector<std::vector<const StdvProfile *>> per_label(labels.size());
    std::vector<std::size_t> fibres_done(labels.size(), 0);
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (units[k].length_index != li || !results[k]) continue;
      per_label[units[k].label_index].push_back(&results[k]->profile);
      ++fibres_done[units[k].label_index];
      ++st.work_units;
      st.segment_frames += results[k]->segment_frames;
    }
    ls.fibres = fibres_done.empty() ? 0 : *std::min_element(fibres_done.begin(), fibres_done.end());
    for (std::size_t e = 0; e < labels.size(); ++e) {
      EstimatorStats es;
      es.label = labels[e];
      finalize(es, per_label[e], cfg.distance_bin_m, cfg.fiber.segment_length_m);
      ls.estimators.push_back(std::move(es));
    }
    fill_histograms(ls, cfg.histogram_bins);
    st.lengths.push_back(std::move(ls));
  }
  return st;
}

} // namespace

std::string_view to_string(SimPath p) { return p == SimPath::fast ? "fast" : "waveform"; }

SimPath sim_path_from_string(std::string_view name) {
  const std::string n = lower(name);
  if (n == "fast") return SimPath::fast;
  if (n == "waveform") return SimPath::waveform;
  throw std::invalid_argument("unknown sim_path '" + std::string(name) + "'");
}

void CampaignConfig::validate() const {
  if (lengths_m.empty()) throw std::invalid_argument("campaign needs at least one fibre length");
  if (estimators.empty()) throw std::invalid_argument("campaign needs at least one estimator");
  if (fibres_per_length < 1) throw std::invalid_argument("fibres_per_length must be >= 1");
  for (std::size_t i = 0; i < estimators.size(); ++i)
    for (std::size_t j = i + 1; j < estimators.size(); ++j)
      if (estimators[i] == estimators[j]) throw std::invalid_argument("duplicate estimator in campaign");
  for (double l : lengths_m) {
    FiberConfig fc = fiber;
    fc.length_m = l;
    fc.validate();
    if (processing.gauge_segments >= fc.segment_count())
      throw std::invalid_argument("gauge does not fit the " + length_tag(l) + " m fibre");
  }
  probe.validate();
  if (!(distance_bin_m > 0.0)) throw std::invalid_argument("distance_bin_m must be > 0");
  if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
  for (double q : crossing_percentiles)
    if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("crossing percentiles must lie in [0, 100]");
  if (processing.gauge_segments < 1) throw std::invalid_argument("gauge_segments must be >= 1");
}

std::vector<std::string> CampaignConfig::labels() const {
  std::vector<std::string> out;
  for (Scheme s : estimators) out.emplace_back(to_string(s));
  if (include_pol_free_baseline) out.emplace_back(kPolFreeLabel);
  return out;
}

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), overflow); }

const EstimatorStats *LengthStats::find(std::string_view label) const {
  for (const EstimatorStats &e : estimators)
    if (e.label == label) return &e;
  return nullptr;
}

double percentile(std::vector<double> data, double q) {
  if (data.empty()) throw std::invalid_argument("percentile of empty data");
  if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(data.begin(), data.end());
  const double pos = q / 100.0 * static_cast<double>(data.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return data[lo] + frac * (data[hi] - data[lo]);
}

CampaignStats run_campaign(const CampaignConfig &cfg) {
  cfg.validate();
  const std::vector<std::string> labels = cfg.labels();

  std::vector<WorkUnit> units;
  for (std::size_t li = 0; li < cfg.lengths_m.size(); ++li)
    for (std::size_t fi = 0; fi < cfg.fibres_per_length; ++fi) {
      for (std::size_t e = 0; e < cfg.estimators.size(); ++e) units.push_back({li, fi, e, cfg.estimators[e]});
      if (cfg.include_pol_free_baseline) units.push_back({li, fi, cfg.estimators.size(), std::nullopt});
    }

  // units before the budget cut-off run; the rest are reported as missing
  std::size_t runnable = units.size();
  std::uint64_t planned = 0;
  for (std::size_t k = 0; k < units.size(); ++k) {
    FiberConfig fc = cfg.fiber;
    fc.length_m = cfg.lengths_m[units[k].length_index];
    const std::uint64_t cost = static_cast<std::uint64_t>(fc.segment_count()) * cfg.probe.frames;
    if (cfg.work_budget != 0 && planned + cost > cfg.work_budget) {
      runnable = k;
      break;
    }
    planned += cost;
  }

  std::vector<std::optional<UnitResult>> results(units.size());
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(runnable, 1));
  log::info("campaign: " + std::to_string(runnable) + " work units on " + std::to_string(threads) + " threads");

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= runnable) return;
      try {
        results[k] = run_unit(cfg, units[k]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(runnable);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  CampaignStats stats = aggregate(cfg, units, results);
  if (runnable < units.size()) {
    std::ostringstream msg;
    msg << "work budget of " << cfg.work_budget << " segment-frames covers " << runnable << " of " << units.size()
        << " work units; partial statistics hold the completed units";
    throw CampaignBudgetError(msg.str(), runnable, units.size(), std::move(stats));
  }
  return stats;
}

CrossingFractions crossing_fractions(const LengthStats &stats, std::string_view reference, std::string_view probe,
                                     const std::vector<double> &percentiles) {
  const EstimatorStats *ref = stats.find(reference);
  const EstimatorStats *prb = stats.find(probe);
  if (!ref || !prb)
    throw std::invalid_argument("crossing fractions need both '" + std::string(reference) + "' and '" +
                                std::string(probe) + "'");
  CrossingFractions cf{std::string(reference), std::string(probe), {}};
  if (ref->stdv.empty() || prb->stdv.empty()) return cf;
  for (double q : percentiles) {
    const double thr = percentile(ref->stdv, q);
    const auto above = std::count_if(prb->stdv.begin(), prb->stdv.end(), [&](double v) { return v > thr; });
    cf.fraction[q] = static_cast<double>(above) / static_cast<double>(prb->stdv.size());
  }
  return cf;
}

CrossingFractions pooled_crossing_fractions(const CampaignStats &stats, std::string_view reference,
                                            std::string_view probe, const std::vector<double> &percentiles) {
  LengthStats pooled;
  EstimatorStats ref, prb;
  ref.label = reference;
  prb.label = probe;
  for (const LengthStats &ls : stats.lengths) {
    const EstimatorStats *r = ls.find(reference);
    const EstimatorStats *p = ls.find(probe);
    if (!r || !p)
      throw std::invalid_argument("crossing fractions need both '" + std::string(reference) + "' and '" +
                                  std::string(probe) + "'");
    ref.stdv.insert(ref.stdv.end(), r->stdv.begin(), r->stdv.end());
    prb.stdv.insert(prb.stdv.end(), p->stdv.begin(), p->stdv.end());
  }
  pooled.estimators.push_back(std::move(ref));
  if (probe != reference) pooled.estimators.push_back(std::move(prb));
  return crossing_fractions(pooled, reference, probe, percentiles);
}

std::vector<SnrSummary> snr_summary(const LengthStats &stats) {
  std::vector<SnrSummary> out;
  for (const EstimatorStats &e : stats.estimators) out.push_back({e.label, e.snr_mean, e.snr_var});
  return out;
}

SnrDifference snr_difference(const LengthStats &stats) {
  SnrDifference d;
  const EstimatorStats *mimo = stats.find(to_string(Scheme::mimo));
  const EstimatorStats *simo = stats.find(to_string(Scheme::simo));
  if (mimo && simo && !mimo->stdv.empty() && !simo->stdv.empty()) {
    d.mean_mimo_minus_simo = mimo->snr_mean - simo->snr_mean;
    d.var_simo_minus_mimo = simo->snr_var - mimo->snr_var;
  }
  return d;
}

std::string campaign_stats_json(const CampaignConfig &cfg, const CampaignStats &stats) {
  ordered_json root;
  root["work_units"] = stats.work_units;
  root["segment_frames"] = stats.segment_frames;
  const std::string ref(to_string(cfg.reference));
  ordered_json lengths = ordered_json::array();
  for (const LengthStats &ls : stats.lengths) {
    ordered_json jl;
    jl["length_m"] = ls.length_m;
    jl["segments"] = ls.segments;
    jl["fibres"] = ls.fibres;
    ordered_json est = ordered_json::object();
    for (const EstimatorStats &e : ls.estimators) {
      ordered_json je;
      je["samples"] = e.stdv.size();
      je["excluded"] = e.excluded;
      je["mean_flagged_fraction"] = e.mean_flagged_fraction;
      je["mean_stdv_rad"] = e.mean_stdv;
      je["snr_mean_db"] = e.snr_mean;
      je["snr_var_db2"] = e.snr_var;
      ordered_json pc = ordered_json::object();
      for (const auto &[q, v] : e.percentiles) pc["p" + length_tag(q)] = v;
      je["stdv_percentiles_rad"] = pc;
      est[e.label] = je;
    }
    jl["estimators"] = est;

    ordered_json cross = ordered_json::array();
    if (ls.find(ref)) {
      for (const EstimatorStats &e : ls.estimators) {
        if (e.label == ref) continue;
        const CrossingFractions cf = crossing_fractions(ls, ref, e.label, cfg.crossing_percentiles);
        ordered_json jc;
        jc["reference"] = cf.reference;
        jc["probe"] = cf.probe;
        for (const auto &[q, v] : cf.fraction) jc["above_p" + length_tag(q)] = v;
        cross.push_back(jc);
      }
    }
    jl["crossing_fractions"] = cross;

    const SnrDifference d = snr_difference(ls);
    ordered_json jd;
    jd["mean_mimo_minus_simo_db"] = d.mean_mimo_minus_simo ? ordered_json(*d.mean_mimo_minus_simo) : ordered_json();
    jd["var_simo_minus_mimo_db2"] = d.var_simo_minus_mimo ? ordered_json(*d.var_simo_minus_mimo) : ordered_json();
    jl["snr_difference"] = jd;
    lengths.push_back(jl);
  }
  root["lengths"] = lengths;

  ordered_json pooled = ordered_json::array();
  if (!stats.lengths.empty() && stats.lengths.front().find(ref)) {
    for (const EstimatorStats &e : stats.lengths.front().estimators) {
      if (e.label == ref) continue;
      const CrossingFractions cf = pooled_crossing_fractions(stats, ref, e.label, cfg.crossing_percentiles);
      ordered_json jc;
      jc["reference"] = cf.reference;
      jc["probe"] = cf.probe;
      for (const auto &[q, v] : cf.fraction) jc["above_p" + length_tag(q)] = v;
      pooled.push_back(jc);
    }
  }
  root["pooled_crossing_fractions"] = pooled;
  return root.dump(2) + "\n";
}

void write_campaign_outputs(const std::filesystem::path &dir, const CampaignConfig &cfg, const CampaignStats &stats) {
  io::ensure_directory(dir);
  io::write_text(dir / "stats.json", campaign_stats_json(cfg, stats));

  for (const LengthStats &ls : stats.lengths) {
    for (const EstimatorStats &e : ls.estimators) {
      io::CsvWriter csv(dir / ("hist_" + length_tag(ls.length_m) + "_" + e.label + ".csv"),
                        {"bin_lo_rad", "bin_hi_rad", "count"});
      for (std::size_t b = 0; b < e.histogram.counts.size(); ++b) {
        csv.cell(e.histogram.edges[b]).cell(e.histogram.edges[b + 1]).cell(e.histogram.counts[b]);
        csv.end_row();
      }
      csv.cell(e.histogram.edges.empty() ? 0.0 : e.histogram.edges.back()).cell("inf").cell(e.histogram.overflow);
      csv.end_row();
      csv.close();
    }
  }

  io::CsvWriter curve(dir / "stdv_vs_distance.csv", {"length_m", "estimator", "distance_m", "mean_stdv_rad", "count"});
  for (const LengthStats &ls : stats.lengths) {
    for (const EstimatorStats &e : ls.estimators) {
      for (std::size_t b = 0; b < e.curve.mean_stdv.size(); ++b) {
        curve.cell(ls.length_m).cell(e.label).cell(e.curve.bin_center_m[b]).cell(e.curve.mean_stdv[b]).cell(
            e.curve.count[b]);
        curve.end_row();
      }
    }
  }
  curve.close();
}

} // namespace mimosense
