// src/wav.cc

// Copyright 2026  The Wavefront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "wavefront/data.h"
#include "wavefront/error.h"

namespace wavefront {
namespace {

constexpr int kSampleRate = 16000;

std::uint32_t read_u32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t read_u16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xFF));
  b.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

Waveform parse_wav(const std::string& bytes) {
  if (bytes.size() < 12) throw IoError("wav: truncated RIFF header");
  if (bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw FormatError("riff", "wav: not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) throw IoError("wav: chunk '" + id + "' is truncated");
    if (id == "fmt ") {
      if (size < 16) throw IoError("wav: fmt chunk is truncated");
      const auto format = read_u16(bytes, body);
      const auto channels = read_u16(bytes, body + 2);
      const auto rate = read_u32(bytes, body + 4);
      const auto bits = read_u16(bytes, body + 14);
      if (format != 1) {
        throw FormatError("codec", "wav: unsupported codec " + std::to_string(format) +
                                       " (need PCM)");
      }
      if (channels != 1) {
        throw FormatError("channels",
                          "wav: " + std::to_string(channels) + " channels (need mono)");
      }
      if (rate != kSampleRate) {
        throw FormatError("sample_rate", "wav: sample_rate " + std::to_string(rate) +
                                             " Hz (need 16000)");
      }
      if (bits != 16) {
        throw FormatError("bits_per_sample",
                          "wav: " + std::to_string(bits) + "-bit samples (need 16)");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("fmt", "wav: data chunk before fmt chunk");
      if (size % 2 != 0) throw IoError("wav: data chunk has an odd byte count");
      Waveform w;
      w.sample_rate = kSampleRate;
      w.samples.resize(size / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
        w.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) throw FormatError("fmt", "wav: missing fmt chunk");
  throw IoError("wav: missing data chunk");
}

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

std::string encode_wav(const Waveform& w) {
  if (w.sample_rate != kSampleRate) {
    throw FormatError("sample_rate", "wav: can only write 16000 Hz audio");
  }
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  put_u32(b, 36 + data_bytes);
  b += "WAVE";
  b += "fmt ";
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, kSampleRate);
  put_u32(b, kSampleRate * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  b += "data";
  put_u32(b, data_bytes);
  for (double s : w.samples) {
    const double scaled = std::nearbyint(s * 32768.0);
    const double clipped = std::min(32767.0, std::max(-32768.0, scaled));
    put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(clipped)));
  }
  return b;
}

void write_wav(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const std::string bytes = encode_wav(w);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

Waveform pad_or_trim(const Waveform& w, double duration_s) {
  const auto target = static_cast<std::size_t>(std::llround(duration_s * w.sample_rate));
  Waveform out{w.samples, w.sample_rate};
  out.samples.resize(target, 0.0);
  return out;
}

}  // namespace wavefront
