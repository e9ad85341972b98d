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

// Little-endian encoding helpers shared by the WAV writer and the
// posterior/mask containers.

#ifndef MOVA_BINARY_IO_HPP_
#define MOVA_BINARY_IO_HPP_

#include <cstdint>
#include <cstring>
#include <istream>
#include <string>
#include <vector>

namespace mova {

inline void append_u16_le(std::vector<unsigned char>& buf, std::uint16_t v) {
  buf.push_back(static_cast<unsigned char>(v & 0xFF));
  buf.push_back(static_cast<unsigned char>(v >> 8));
}

inline void append_u32_le(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

inline void append_f32_le(std::vector<unsigned char>& buf, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  append_u32_le(buf, u);
}

inline std::uint32_t decode_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float decode_f32_le(const unsigned char* p) {
  const std::uint32_t u = decode_u32_le(p);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

std::uint16_t read_u16_le(std::istream& is);
std::uint32_t read_u32_le(std::istream& is);

// 16-byte header: 8-byte magic, u32 rows, u32 columns (little-endian),
// followed by rows * columns fixed-size cells.
struct Container {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<unsigned char> payload;
};

std::vector<unsigned char> container_header(const char (&magic)[8], std::uint32_t rows,
                                            std::uint32_t cols);
Container read_container(const std::string& path, const char (&magic)[8], std::size_t cell_bytes);

std::vector<unsigned char> read_file_bytes(const std::string& path);
// Writes to a temporary sibling and renames it into place.
void write_file_atomically(const std::string& path, const std::vector<unsigned char>& bytes);
void write_file_atomically(const std::string& path, const std::string& text);

}  // namespace mova

#endif  // MOVA_BINARY_IO_HPP_
