// Copyright 2026 The OODLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/io_util.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace oodlab {

void BinaryWriter::u32(uint32_t v) {
  const size_t off = bytes_.size();
  bytes_.resize(off + 4);
  std::memcpy(bytes_.data() + off, &v, 4);
}

void BinaryWriter::f32(float v) {
  const size_t off = bytes_.size();
  bytes_.resize(off + 4);
  std::memcpy(bytes_.data() + off, &v, 4);
}

void BinaryWriter::f64(double v) {
  const size_t off = bytes_.size();
  bytes_.resize(off + 8);
  std::memcpy(bytes_.data() + off, &v, 8);
}

void BinaryWriter::magic(const char tag[5]) { raw(tag, 4); }

void BinaryWriter::raw(const void* data, size_t n) {
  const size_t off = bytes_.size();
  bytes_.resize(off + n);
  std::memcpy(bytes_.data() + off, data, n);
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes_.data()),
            static_cast<std::streamsize>(bytes_.size()));
  require(out.good(), ErrorKind::kIo, "write failed: " + path.string());
}

BinaryReader BinaryReader::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return BinaryReader(std::move(bytes));
}

uint8_t BinaryReader::u8() {
  uint8_t v;
  raw(&v, 1);
  return v;
}

uint32_t BinaryReader::u32() {
  uint32_t v;
  raw(&v, 4);
  return v;
}

float BinaryReader::f32() {
  float v;
  raw(&v, 4);
  return v;
}

double BinaryReader::f64() {
  double v;
  raw(&v, 8);
  return v;
}

void BinaryReader::expect_magic(const char tag[5]) {
  char got[4];
  raw(got, 4);
  require(std::memcmp(got, tag, 4) == 0, ErrorKind::kIo,
          std::string("bad magic, expected ") + tag);
}

void BinaryReader::raw(void* out, size_t n) {
  require(pos_ + n <= bytes_.size(), ErrorKind::kIo,
          "unexpected end of binary payload");
  std::memcpy(out, bytes_.data() + pos_, n);
  pos_ += n;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::kIo, "cannot open " + path.string());
  out << content;
  require(out.good(), ErrorKind::kIo, "write failed: " + path.string());
}

std::string fnv1a_hex(const std::string& content) {
  const uint64_t h = hash64(content);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string fmt_double(double v, int precision) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return std::string(buf);
}

std::string base64_encode(const std::vector<uint8_t>& data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const uint32_t v = (static_cast<uint32_t>(data[i]) << 16) |
                       (static_cast<uint32_t>(data[i + 1]) << 8) |
                       data[i + 2];
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
  }
  const size_t rem = data.size() - i;
  if (rem == 1) {
    const uint32_t v = static_cast<uint32_t>(data[i]) << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    const uint32_t v = (static_cast<uint32_t>(data[i]) << 16) |
                       (static_cast<uint32_t>(data[i + 1]) << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

}  // namespace oodlab
