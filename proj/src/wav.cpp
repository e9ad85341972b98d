// Copyright 2026 The mova Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mova/wav.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "mova/binary_io.hpp"

namespace mova {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct ParsedHeader {
  WavInfo info;
  std::uint16_t block_align = 0;
  std::streamoff data_offset = 0;
};

ParsedHeader parse_header(std::istream& is, const std::string& path) {
  char tag[4];
  auto read_tag = [&](char* dst) {
    is.read(dst, 4);
    if (!is) throw DataError("WAV: truncated header in " + path);
  };
  read_tag(tag);
  if (std::memcmp(tag, "RIFF", 4) != 0) throw DataError("WAV: missing RIFF tag in " + path);
  read_u32_le(is);
  read_tag(tag);
  if (std::memcmp(tag, "WAVE", 4) != 0) throw DataError("WAV: missing WAVE tag in " + path);

  ParsedHeader h;
  bool have_fmt = false;
  std::uint16_t format = 0;
  while (true) {
    read_tag(tag);
    const std::uint32_t size = read_u32_le(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) throw DataError("WAV: short fmt chunk in " + path);
      format = read_u16_le(is);
      h.info.num_channels = read_u16_le(is);
      h.info.fs = read_u32_le(is);
      read_u32_le(is);
      h.block_align = read_u16_le(is);
      h.info.bits_per_sample = read_u16_le(is);
      std::uint32_t consumed = 16;
      if (format == kFormatExtensible && size >= 26) {
        read_u16_le(is);  // cbSize
        read_u16_le(is);  // valid bits
        read_u32_le(is);  // channel mask
        format = read_u16_le(is);
        consumed = 26;
      }
      is.ignore(size - consumed + (size & 1));
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw DataError("WAV: data chunk before fmt chunk in " + path);
      h.data_offset = is.tellg();
      if (h.block_align == 0) throw DataError("WAV: zero block alignment in " + path);
      h.info.num_samples = size / h.block_align;
      break;
    } else {
      is.ignore(size + (size & 1));
    }
    if (!is) throw DataError("WAV: no data chunk in " + path);
  }
  if (format == kFormatFloat) {
    if (h.info.bits_per_sample != 32 && h.info.bits_per_sample != 64)
      throw DataError("WAV: unsupported float width in " + path);
    h.info.is_float = true;
  } else if (format == kFormatPcm) {
    if (h.info.bits_per_sample != 16 && h.info.bits_per_sample != 24 &&
        h.info.bits_per_sample != 32)
      throw DataError("WAV: unsupported PCM width in " + path);
  } else {
    throw DataError("WAV: unsupported format tag in " + path);
  }
  if (h.info.num_channels == 0) throw DataError("WAV: zero channels in " + path);
  if (h.block_align != h.info.num_channels * (h.info.bits_per_sample / 8))
    throw DataError("WAV: inconsistent block alignment in " + path);
  return h;
}

}  // namespace

WavInfo read_wav_info(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV: " + path);
  return parse_header(is, path).info;
}

Audio read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV: " + path);
  const ParsedHeader h = parse_header(is, path);
  const WavInfo& info = h.info;
  std::vector<unsigned char> raw(info.num_samples * h.block_align);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size())
    throw DataError("WAV: truncated data in " + path);

  Audio out(info.fs, info.num_channels, info.num_samples);
  const int bytes = info.bits_per_sample / 8;
  const unsigned char* p = raw.data();
  for (std::size_t n = 0; n < info.num_samples; ++n) {
    for (std::size_t c = 0; c < info.num_channels; ++c, p += bytes) {
      double v = 0.0;
      if (info.is_float && bytes == 4) {
        v = decode_f32_le(p);
      } else if (info.is_float) {
        std::uint64_t u = 0;
        for (int b = 7; b >= 0; --b) u = (u << 8) | p[b];
        double d;
        std::memcpy(&d, &u, 8);
        v = d;
      } else if (bytes == 2) {
        v = static_cast<std::int16_t>(p[0] | (p[1] << 8)) / 32768.0;
      } else if (bytes == 3) {
        std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        const std::int32_t s = static_cast<std::int32_t>(
            static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
            (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24));
        v = s / 2147483648.0;
      }
      out.channels[c][n] = v;
    }
  }
  return out;
}

void write_wav(const std::string& path, const Audio& audio) {
  if (audio.num_channels() == 0) throw UsageError("write_wav: no channels");
  const std::size_t len = audio.length();
  for (const auto& ch : audio.channels)
    if (ch.size() != len) throw UsageError("write_wav: channels differ in length");
  const std::uint32_t nch = static_cast<std::uint32_t>(audio.num_channels());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(len * nch * 4);

  std::vector<unsigned char> buf;
  buf.reserve(44 + data_bytes);
  auto tag = [&](const char* s) { buf.insert(buf.end(), s, s + 4); };
  tag("RIFF");
  append_u32_le(buf, 36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  append_u32_le(buf, 16);
  append_u16_le(buf, kFormatFloat);
  append_u16_le(buf, static_cast<std::uint16_t>(nch));
  append_u32_le(buf, static_cast<std::uint32_t>(audio.fs));
  append_u32_le(buf, static_cast<std::uint32_t>(audio.fs) * nch * 4);
  append_u16_le(buf, static_cast<std::uint16_t>(nch * 4));
  append_u16_le(buf, 32);
  tag("data");
  append_u32_le(buf, data_bytes);
  for (std::size_t n = 0; n < len; ++n)
    for (std::uint32_t c = 0; c < nch; ++c) append_f32_le(buf, static_cast<float>(audio.channels[c][n]));

  write_file_atomically(path, buf);
}

}  // namespace mova
