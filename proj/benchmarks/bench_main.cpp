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

#include <benchmark/benchmark.h>

#include "mimosense/campaign.hpp"
#include "mimosense/fiber.hpp"
#include "mimosense/interrogation.hpp"
#include "mimosense/log.hpp"

using namespace mimosense;

namespace {

std::vector<JonesMatrix> responses(double length_m) {
  FiberConfig fc;
  fc.length_m = length_m;
  return dual_pass_response(synthesize(fc), 0.0, 0.0);
}

void BM_GolayPair(benchmark::State &state) {
  for (auto _ : state) benchmark::DoNotOptimize(golay_pair(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GolayPair)->Arg(10)->Arg(13)->Arg(16);

void BM_Synthesize(benchmark::State &state) {
  FiberConfig fc;
  fc.length_m = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(fc));
}
BENCHMARK(BM_Synthesize)->Arg(340)->Arg(10000);

void BM_SimulateBackscatter(benchmark::State &state) {
  const auto h = responses(static_cast<double>(state.range(0)));
  ProbeConfig cfg;
  cfg.frames = 1;
  const Probe probe = build_probe_for(cfg, h.size(), 2.0);
  Rng laser = substream(1, Stream::laser), rx = substream(1, Stream::rx);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_backscatter(h, probe, laser, rx));
}
BENCHMARK(BM_SimulateBackscatter)->Arg(340)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_EstimateChannel(benchmark::State &state) {
  const auto h = responses(static_cast<double>(state.range(0)));
  ProbeConfig cfg;
  cfg.frames = 1;
  const Probe probe = build_probe_for(cfg, h.size(), 2.0);
  Rng laser = substream(1, Stream::laser), rx = substream(1, Stream::rx);
  const ReceivedWaveform rw = simulate_backscatter(h, probe, laser, rx);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_channel(rw, probe));
}
BENCHMARK(BM_EstimateChannel)->Arg(340)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FastChannelSim(benchmark::State &state) {
  const auto h = responses(static_cast<double>(state.range(0)));
  ProbeConfig cfg;
  cfg.frames = 100;
  const Probe probe = build_probe_for(cfg, h.size(), 2.0);
  Rng laser = substream(1, Stream::laser), rx = substream(1, Stream::rx);
  for (auto _ : state) benchmark::DoNotOptimize(fast_channel_sim(h, probe, laser, rx));
}
BENCHMARK(BM_FastChannelSim)->Arg(340)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Campaign(benchmark::State &state) {
  log::set_level(log::Level::quiet);
  CampaignConfig cfg;
  cfg.fibres_per_length = 20;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(cfg));
}
BENCHMARK(BM_Campaign)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
