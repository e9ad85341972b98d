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

#include "mova/binary_io.hpp"

#include <atomic>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mova/common.hpp"

namespace mova {

std::uint16_t read_u16_le(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  if (!is) throw DataError("unexpected end of file");
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t read_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw DataError("unexpected end of file");
  return decode_u32_le(b);
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
}

std::vector<unsigned char> container_header(const char (&magic)[8], std::uint32_t rows,
                                            std::uint32_t cols) {
  std::vector<unsigned char> buf(magic, magic + 8);
  append_u32_le(buf, rows);
  append_u32_le(buf, cols);
  return buf;
}

Container read_container(const std::string& path, const char (&magic)[8], std::size_t cell_bytes) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), magic, 8) != 0)
    throw DataError("bad magic/version header in " + path);
  Container c;
  c.rows = decode_u32_le(bytes.data() + 8);
  c.cols = decode_u32_le(bytes.data() + 12);
  if (c.cols == 0) throw DataError("zero columns declared in " + path);
  const std::size_t row_bytes = static_cast<std::size_t>(c.cols) * cell_bytes;
  const std::size_t body = bytes.size() - 16;
  if (body != static_cast<std::size_t>(c.rows) * row_bytes) {
    throw DataError("frame-count mismatch in " + path + ": header declares " +
                    std::to_string(c.rows) + " frames, file holds " +
                    std::to_string(body / row_bytes) + (body % row_bytes ? " (partial)" : ""));
  }
  c.payload.assign(bytes.begin() + 16, bytes.end());
  return c;
}

namespace {

template <typename Bytes>
void write_atomic(const std::string& path, const Bytes& bytes) {
  static std::atomic<unsigned> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  const std::string tmp =
      path + ".tmp" + std::to_string(tid % 100000) + "_" + std::to_string(counter++);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open for writing: " + path);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw DataError("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot move file into place: " + path);
  }
}

}  // namespace

void write_file_atomically(const std::string& path, const std::vector<unsigned char>& bytes) {
  write_atomic(path, bytes);
}

void write_file_atomically(const std::string& path, const std::string& text) {
  write_atomic(path, text);
}

}  // namespace mova
