// Copyright 2026 The DADP Authors
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

#ifndef DADP_NNMATH_BINARY_IO_H_
#define DADP_NNMATH_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dadp {

// Little-endian encoder into an in-memory byte buffer.
class BinaryWriter {
 public:
  void Bytes(std::string_view raw);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F32(float v);
  void F64(double v);
  // u32 length prefix followed by the bytes.
  void String(std::string_view s);

  const std::vector<char>& buffer() const { return buffer_; }

 private:
  std::vector<char> buffer_;
};

// Bounds-checked decoder; every read past the end throws IoError.
class BinaryReader {
 public:
  explicit BinaryReader(std::span<const char> data) : data_(data) {}

  std::string Bytes(size_t n);
  uint32_t U32();
  uint64_t U64();
  float F32();
  double F64();
  std::string String();

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  std::span<const char> Take(size_t n);

  std::span<const char> data_;
  size_t pos_ = 0;
};

std::vector<char> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const char> bytes);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace dadp

#endif  // DADP_NNMATH_BINARY_IO_H_
