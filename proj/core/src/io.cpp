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

#include "mimosense/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include "mimosense/error.hpp"

namespace mimosense::io {

namespace {

constexpr std::array<char, 4> kFiberMagic{'F', 'F', 'R', '1'};
constexpr std::array<char, 4> kEstimateMagic{'F', 'C', 'E', '1'};

class Writer {
public:
  explicit Writer(const std::filesystem::path &path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  }

  void bytes(const char *p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  template <class U> void uint(U v) {
    char b[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    bytes(b, sizeof(U));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write to '" + path_.string() + "' failed");
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
public:
  explicit Reader(const std::filesystem::path &path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path.string() + "'");
  }

  void bytes(char *p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw IoError("'" + path_.string() + "' is truncated");
  }
  template <class U> U uint() {
    unsigned char b[sizeof(U)];
    bytes(reinterpret_cast<char *>(b), sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(b[i]) << (8 * i));
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  void magic(const std::array<char, 4> &expect) {
    std::array<char, 4> m{};
    bytes(m.data(), 4);
    if (m != expect)
      throw IoError("'" + path_.string() + "' is not a " + std::string(expect.data(), 4) + " file");
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw IoError("'" + path_.string() + "' has trailing data");
  }

private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::size_t entries_per_segment(Scheme s) {
  switch (s) {
  case Scheme::siso: return 1;
  case Scheme::simo:
  case Scheme::miso: return 2;
  case Scheme::mimo: return 4;
  }
  return 4;
}

} // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path &path, std::initializer_list<std::string_view> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  for (std::string_view h : header) cell(h);
  end_row();
}

CsvWriter &CsvWriter::cell(std::string_view text) {
  if (!first_) out_.put(',');
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  first_ = false;
  return *this;
}

CsvWriter &CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter &CsvWriter::cell(std::uint64_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  out_.put('\n');
  first_ = true;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write to '" + path_.string() + "' failed");
  out_.close();
}

void write_text(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void save_fiber(const std::filesystem::path &path, const FiberRealization &fib) {
  if (fib.size() > 0xffffffffu) throw std::invalid_argument("too many segments for FFR1");
  Writer w(path);
  w.bytes(kFiberMagic.data(), 4);
  w.uint(static_cast<std::uint32_t>(fib.size()));
  w.f64(fib.segment_length_m);
  w.uint(fib.seed);
  for (const FiberSegment &s : fib.segments) {
    for (cdouble z : {s.unitary.xx, s.unitary.xy, s.unitary.yx, s.unitary.yy}) {
      w.f64(z.real());
      w.f64(z.imag());
    }
    w.f64(s.phasor.real());
    w.f64(s.phasor.imag());
    w.f64(s.attenuation);
  }
  w.finish();
}

FiberRealization load_fiber(const std::filesystem::path &path) {
  Reader r(path);
  r.magic(kFiberMagic);
  FiberRealization fib;
  const std::uint32_t n = r.uint<std::uint32_t>();
  fib.segment_length_m = r.f64();
  fib.seed = r.uint<std::uint64_t>();
  if (!(fib.segment_length_m > 0.0)) throw IoError("'" + path.string() + "' has a non-positive segment length");
  fib.segments.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    FiberSegment &s = fib.segments[i];
    cdouble *u[4] = {&s.unitary.xx, &s.unitary.xy, &s.unitary.yx, &s.unitary.yy};
    for (cdouble *z : u) {
      const double re = r.f64();
      *z = {re, r.f64()};
    }
    const double pre = r.f64();
    s.phasor = {pre, r.f64()};
    s.attenuation = r.f64();
    s.distance_m = static_cast<double>(i + 1) * fib.segment_length_m;
  }
  r.expect_end();
  return fib;
}

void save_channel_estimate(const std::filesystem::path &path, const ChannelEstimate &est) {
  if (est.frames() > 0xffffffffu || est.segments() > 0xffffffffu)
    throw std::invalid_argument("channel estimate too large for FCE1");
  Writer w(path);
  w.bytes(kEstimateMagic.data(), 4);
  w.uint(static_cast<std::uint8_t>(est.scheme()));
  w.uint(static_cast<std::uint32_t>(est.frames()));
  w.uint(static_cast<std::uint32_t>(est.segments()));
  w.f64(est.frame_period());
  auto put = [&](cdouble z) {
    w.f32(static_cast<float>(z.real()));
    w.f32(static_cast<float>(z.imag()));
  };
  for (std::size_t t = 0; t < est.frames(); ++t) {
    for (const JonesMatrix &h : est.frame(t)) {
      put(h.xx);
      switch (est.scheme()) {
      case Scheme::siso: break;
      case Scheme::simo: put(h.yx); break;
      case Scheme::miso: put(h.xy); break;
      case Scheme::mimo:
        put(h.xy);
        put(h.yx);
        put(h.yy);
        break;
      }
    }
  }
  w.finish();
}

ChannelEstimate load_channel_estimate(const std::filesystem::path &path) {
  Reader r(path);
  r.magic(kEstimateMagic);
  const std::uint8_t code = r.uint<std::uint8_t>();
  if (code > 3) throw IoError("'" + path.string() + "' has an unknown scheme code");
  const Scheme scheme = static_cast<Scheme>(code);
  const std::uint32_t frames = r.uint<std::uint32_t>();
  const std::uint32_t segments = r.uint<std::uint32_t>();
  const double period = r.f64();
  const std::uintmax_t expect = 4 + 1 + 4 + 4 + 8 + std::uintmax_t{frames} * segments * entries_per_segment(scheme) * 8;
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size != expect) throw IoError("'" + path.string() + "' size does not match its header");

  ChannelEstimate est(scheme, frames, segments, period);
  auto get = [&] {
    const float re = r.f32();
    return cdouble{re, r.f32()};
  };
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < segments; ++i) {
      JonesMatrix &h = est.at(t, i);
      h = JonesMatrix::zero();
      h.xx = get();
      switch (scheme) {
      case Scheme::siso: break;
      case Scheme::simo: h.yx = get(); break;
      case Scheme::miso: h.xy = get(); break;
      case Scheme::mimo:
        h.xy = get();
        h.yx = get();
        h.yy = get();
        break;
      }
    }
  }
  r.expect_end();
  return est;
}

void write_stdv_csv(const std::filesystem::path &path, const StdvProfile &profile) {
  CsvWriter csv(path, {"segment_index", "distance_m", "stdv_rad", "snr_db", "flagged_fraction"});
  for (std::size_t k = 0; k < profile.size(); ++k) {
    csv.cell(static_cast<std::uint64_t>(profile.segment_index[k]))
        .cell(profile.distance_m[k])
        .cell(profile.stdv_rad[k])
        .cell(profile.snr_db[k])
        .cell(profile.flagged_fraction[k]);
    csv.end_row();
  }
  csv.close();
}

void write_fading_map_csv(const std::filesystem::path &path, const FadingMap &map, std::string_view x_label,
                          std::string_view y_label) {
  const std::string corner = std::string(y_label) + "\\" + std::string(x_label);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << corner;
  for (double x : map.x) out << ',' << format_number(x);
  out << '\n';
  for (std::size_t iy = 0; iy < map.y.size(); ++iy) {
    out << format_number(map.y[iy]);
    for (std::size_t ix = 0; ix < map.x.size(); ++ix) out << ',' << format_number(map.at(iy, ix));
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace mimosense::io
