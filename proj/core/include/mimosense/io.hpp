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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "mimosense/estimation.hpp"
#include "mimosense/fiber.hpp"
#include "mimosense/interrogation.hpp"

namespace mimosense::io {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

/// Comma-separated, LF-terminated, header row first. Throws IoError.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path &path, std::initializer_list<std::string_view> header);

  CsvWriter &cell(std::string_view text);
  CsvWriter &cell(double v);
  CsvWriter &cell(std::uint64_t v);
  void end_row();
  void close();

private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_{true};
};

void write_text(const std::filesystem::path &path, std::string_view text);
std::string read_text(const std::filesystem::path &path);

/// Creates the directory tree if needed; throws IoError if it is not writable.
void ensure_directory(const std::filesystem::path &dir);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

/// Binary fibre realization: "FFR1", u32 N, f64 L_s, u64 seed, then per
/// segment U (4 complex f64), p (complex f64), A (f64), little-endian.
void save_fiber(const std::filesystem::path &path, const FiberRealization &fib);
FiberRealization load_fiber(const std::filesystem::path &path);

/// Binary channel estimate: "FCE1", u8 scheme, u32 frames, u32 segments,
/// f64 frame_period, then frame-major complex f32 entries (4 for MIMO, 2 for
/// SIMO and MISO, 1 for SISO per segment), little-endian.
void save_channel_estimate(const std::filesystem::path &path, const ChannelEstimate &est);
ChannelEstimate load_channel_estimate(const std::filesystem::path &path);

/// segment_index,distance_m,stdv_rad,snr_db,flagged_fraction
void write_stdv_csv(const std::filesystem::path &path, const StdvProfile &profile);

/// First row: corner label then x values; following rows: y value then |c|.
void write_fading_map_csv(const std::filesystem::path &path, const FadingMap &map, std::string_view x_label,
                          std::string_view y_label);

} // namespace mimosense::io
