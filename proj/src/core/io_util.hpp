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

#ifndef OODLAB_CORE_IO_UTIL_HPP_
#define OODLAB_CORE_IO_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace oodlab {

// All on-disk binary formats are little-endian.
static_assert(__BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__,
              "big-endian hosts are not supported");

class BinaryWriter {
 public:
  void u8(uint8_t v) { bytes_.push_back(v); }
  void u32(uint32_t v);
  void f32(float v);
  void f64(double v);
  void magic(const char tag[5]);
  void raw(const void* data, size_t n);

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<uint8_t> bytes_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::vector<uint8_t> bytes)
      : bytes_(std::move(bytes)) {}
  static BinaryReader load(const std::filesystem::path& path);

  uint8_t u8();
  uint32_t u32();
  float f32();
  double f64();
  void expect_magic(const char tag[5]);
  void raw(void* out, size_t n);
  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  std::vector<uint8_t> bytes_;
  size_t pos_ = 0;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

// 16-hex-digit FNV-1a of a string, used for content-addressed directories.
std::string fnv1a_hex(const std::string& content);

// Fixed-format floats keep emitted CSV/SVG byte-reproducible.
std::string fmt_double(double v, int precision = 6);

std::string base64_encode(const std::vector<uint8_t>& data);

}  // namespace oodlab

#endif  // OODLAB_CORE_IO_UTIL_HPP_
