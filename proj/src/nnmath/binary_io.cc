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

#include "dadp/nnmath/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dadp/errors.h"

namespace dadp {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void BinaryWriter::Bytes(std::string_view raw) {
  buffer_.insert(buffer_.end(), raw.begin(), raw.end());
}

void BinaryWriter::U32(uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buffer_.insert(buffer_.end(), b, b + 4);
}

void BinaryWriter::U64(uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  buffer_.insert(buffer_.end(), b, b + 8);
}

void BinaryWriter::F32(float v) { U32(std::bit_cast<uint32_t>(v)); }

void BinaryWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void BinaryWriter::String(std::string_view s) {
  U32(static_cast<uint32_t>(s.size()));
  Bytes(s);
}

std::span<const char> BinaryReader::Take(size_t n) {
  if (n > data_.size() - pos_) {
    throw IoError("truncated binary data at offset " + std::to_string(pos_));
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string BinaryReader::Bytes(size_t n) {
  auto s = Take(n);
  return std::string(s.begin(), s.end());
}

uint32_t BinaryReader::U32() {
  uint32_t v;
  std::memcpy(&v, Take(4).data(), 4);
  return v;
}

uint64_t BinaryReader::U64() {
  uint64_t v;
  std::memcpy(&v, Take(8).data(), 8);
  return v;
}

float BinaryReader::F32() { return std::bit_cast<float>(U32()); }

double BinaryReader::F64() { return std::bit_cast<double>(U64()); }

std::string BinaryReader::String() { return Bytes(U32()); }

std::vector<char> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  WriteFileBytes(path, std::span<const char>(text.data(), text.size()));
}

}  // namespace dadp
