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

#include "mimosense/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"

#include "mimosense/campaign.hpp"
#include "mimosense/config.hpp"
#include "mimosense/error.hpp"
#include "mimosense/estimation.hpp"
#include "mimosense/fiber.hpp"
#include "mimosense/interrogation.hpp"
#include "mimosense/io.hpp"
#include "mimosense/log.hpp"
#include "mimosense/rng.hpp"

namespace mimosense::cli {

namespace fs = std::filesystem;

namespace {

Settings resolve_settings(const Invocation &inv) {
  Settings s = inv.config_path.empty() ? Settings{} : load_settings(inv.config_path);
  if (inv.seed) s.set_seed(*inv.seed);
  if (inv.threads) s.campaign.threads = *inv.threads;
  return s;
}

std::vector<std::string> names(const std::vector<fs::path> &paths) {
  std::vector<std::string> out;
  for (const fs::path &p : paths) out.push_back(p.filename().string());
  return out;
}

void write_manifest(const fs::path &dir, std::string_view sub, const Settings &s,
                    const std::vector<std::string> &inputs, const std::vector<fs::path> &outputs) {
  io::write_text(dir / "manifest.json", manifest_json(sub, s, inputs, names(outputs)));
}

std::vector<fs::path> run_fiber(const Settings &s, const fs::path &out) {
  const FiberRealization fib = synthesize(s.fiber());
  const fs::path bin = out / "fiber.ffr", csv_path = out / "fiber.csv";
  io::save_fiber(bin, fib);
  io::CsvWriter csv(csv_path, {"segment_index", "distance_m", "attenuation", "phasor_re", "phasor_im", "beta", "gamma",
                               "theta_rot", "s1", "s2", "s3"});
  for (std::size_t i = 0; i < fib.size(); ++i) {
    const FiberSegment &seg = fib.segments[i];
    const PolarizationParams p = fib.params.empty() ? PolarizationParams{} : fib.params[i];
    const StokesVector sv = jones_to_stokes(seg.unitary * JonesVector{});
    csv.cell(static_cast<std::uint64_t>(i + 1)).cell(seg.distance_m).cell(seg.attenuation);
    csv.cell(seg.phasor.real()).cell(seg.phasor.imag()).cell(p.beta).cell(p.gamma).cell(p.theta_rot);
    csv.cell(sv.s1 / sv.s0).cell(sv.s2 / sv.s0).cell(sv.s3 / sv.s0);
    csv.end_row();
  }
  csv.close();
  return {bin, csv_path};
}

std::vector<fs::path> run_probe(const Settings &s, const fs::path &input, const fs::path &out) {
  if (input.empty()) throw ConfigError("probe needs --input <fiber.ffr>");
  const FiberRealization fib = io::load_fiber(input);
  const std::vector<JonesMatrix> h = dual_pass_response(fib, s.fiber().alpha, s.fiber().theta_misalign);
  const Probe probe = build_probe_for(s.probe(), fib.size(), fib.segment_length_m);

  std::vector<StrainEvent> strain;
  if (s.strain_segment > 0) {
    if (s.strain_segment > fib.size()) throw ConfigError("strain_segment lies beyond the fibre");
    StrainEvent ev;
    ev.segment_index = s.strain_segment;
    ev.displacement_m.resize(s.probe().frames);
    const double period = probe.layout.frame_period();
    for (std::size_t t = 0; t < ev.displacement_m.size(); ++t)
      ev.displacement_m[t] = s.strain_amplitude_m *
                             std::sin(2.0 * std::numbers::pi * s.strain_frequency_hz * static_cast<double>(t) * period);
    strain.push_back(std::move(ev));
  }

  const auto id = static_cast<std::uint64_t>(s.probe().scheme);
  Rng laser = substream(s.campaign.seed, Stream::laser, id);
  Rng rx = substream(s.campaign.seed, Stream::rx, id);
  const ChannelEstimate est = s.campaign.sim_path == SimPath::fast
                                  ? fast_channel_sim(h, probe, laser, rx, strain)
                                  : estimate_channel(simulate_backscatter(h, probe, laser, rx, strain), probe);
  const fs::path path = out / "channel.fce";
  io::save_channel_estimate(path, est);
  return {path};
}

std::vector<fs::path> run_estimate(const Settings &s, const fs::path &input, const fs::path &out) {
  if (input.empty()) throw ConfigError("estimate needs --input <channel.fce>");
  const ChannelEstimate est = io::load_channel_estimate(input);
  const StdvProfile prof = profile_from_estimate(est, s.fiber().segment_length_m, s.campaign.processing);
  const fs::path path = out / "stdv.csv";
  io::write_stdv_csv(path, prof);
  return {path};
}

std::vector<fs::path> run_campaign_cmd(const Settings &s, const fs::path &out) {
  try {
    const CampaignStats stats = run_campaign(s.campaign);
    write_campaign_outputs(out, s.campaign, stats);
  } catch (const CampaignBudgetError &e) {
    write_campaign_outputs(out, s.campaign, e.partial);
    throw;
  }
  std::vector<fs::path> files{out / "stats.json", out / "stdv_vs_distance.csv"};
  for (const fs::directory_entry &e : fs::directory_iterator(out))
    if (e.path().filename().string().rfind("hist_", 0) == 0) files.push_back(e.path());
  std::sort(files.begin() + 2, files.end());
  return files;
}

std::vector<fs::path> run_fading_map(const Settings &s, const fs::path &out) {
  const std::string xl(to_string(s.map.x_axis)), yl(to_string(s.map.y_axis));
  const fs::path simo = out / "fading_map_simo.csv", mimo = out / "fading_map_mimo.csv";
  io::write_fading_map_csv(simo, fading_map(s.map), xl, yl);
  io::write_fading_map_csv(mimo, mimo_fading_map(s.map), xl, yl);
  return {simo, mimo};
}

std::vector<fs::path> run_poincare(const Settings &s, const fs::path &out) {
  std::vector<fs::path> files;
  for (std::size_t r = 0; r < s.poincare_ratios.size(); ++r) {
    const double ratio = s.poincare_ratios[r];
    Rng rng = substream(s.campaign.seed, Stream::trajectory, r);
    PolarizationParams p = draw_haar_params(rng);
    const fs::path path = out / ("poincare_" + io::format_number(ratio) + ".csv");
    io::CsvWriter csv(path, {"segment_index", "distance_over_beat", "s1", "s2", "s3"});
    for (std::size_t i = 1; i <= s.poincare_segments; ++i) {
      p = evolve_params(p, ratio, rng);
      const StokesVector sv = jones_to_stokes(unitary_from_params(p) * JonesVector{});
      csv.cell(static_cast<std::uint64_t>(i)).cell(static_cast<double>(i) * ratio);
      csv.cell(sv.s1 / sv.s0).cell(sv.s2 / sv.s0).cell(sv.s3 / sv.s0);
      csv.end_row();
    }
    csv.close();
    files.push_back(path);
  }
  return files;
}

} // namespace

const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> list{"fiber", "probe", "estimate", "campaign", "fading-map", "poincare"};
  return list;
}

int dispatch(const Invocation &inv) {
  log::set_level(inv.verbosity >= 2 ? log::Level::debug : inv.verbosity == 1 ? log::Level::info : log::Level::warn);
  try {
    const Settings s = resolve_settings(inv);
    const fs::path out(inv.out_dir);
    io::ensure_directory(out);
    const fs::path input(inv.input_path);
    std::vector<std::string> inputs;
    if (!inv.input_path.empty()) inputs.push_back(inv.input_path);

    std::vector<fs::path> files;
    if (inv.subcommand == "fiber") {
      files = run_fiber(s, out);
    } else if (inv.subcommand == "probe") {
      files = run_probe(s, input, out);
    } else if (inv.subcommand == "estimate") {
      files = run_estimate(s, input, out);
    } else if (inv.subcommand == "campaign") {
      files = run_campaign_cmd(s, out);
    } else if (inv.subcommand == "fading-map") {
      files = run_fading_map(s, out);
    } else if (inv.subcommand == "poincare") {
      files = run_poincare(s, out);
    } else {
      throw ConfigError("unknown subcommand '" + inv.subcommand + "'");
    }
    write_manifest(out, inv.subcommand, s, inputs, files);
    for (const fs::path &f : files) log::info("wrote " + f.string());
    return ok;
  } catch (const ConfigError &e) {
    std::cerr << "mimosense: config error: " << e.what() << '\n';
    return config_error;
  } catch (const ResourceBudgetError &e) {
    std::cerr << "mimosense: resource budget: " << e.what() << '\n';
    return budget_error;
  } catch (const IoError &e) {
    std::cerr << "mimosense: I/O error: " << e.what() << '\n';
    return io_error;
  } catch (const std::invalid_argument &e) {
    std::cerr << "mimosense: config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception &e) {
    std::cerr << "mimosense: " << e.what() << '\n';
    return failure;
  }
}

int run(int argc, char **argv) {
  CLI::App app{"Dual-polarization Rayleigh backscatter simulation for phase-OTDR", "mimosense"};
  app.require_subcommand(1, 1);
  Invocation inv;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  app.add_option("--config", inv.config_path, "Flat JSON config (a manifest.json is accepted)");
  app.add_option("--out", inv.out_dir, "Output directory")->capture_default_str();
  app.add_option("--input", inv.input_path, "Stored fibre (probe) or channel estimate (estimate)");
  auto *seed_opt = app.add_option("--seed", seed, "Seed override");
  auto *threads_opt = app.add_option("--threads", threads, "Worker threads for campaigns")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", inv.verbosity, "Increase verbosity (repeatable)");

  const std::pair<const char *, const char *> help[] = {
      {"fiber", "Synthesize a fibre realization"},
      {"probe", "Interrogate a stored fibre"},
      {"estimate", "StDv profile from a stored channel estimate"},
      {"campaign", "Monte Carlo comparison of the estimators"},
      {"fading-map", "SIMO and MIMO phase-fading coefficient grids"},
      {"poincare", "Stokes trajectories along the fibre"},
  };
  for (const auto &[name, text] : help) app.add_subcommand(name, text)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return config_error;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  if (seed_opt->count()) inv.seed = seed;
  if (threads_opt->count()) inv.threads = threads;
  return dispatch(inv);
}

} // namespace mimosense::cli
