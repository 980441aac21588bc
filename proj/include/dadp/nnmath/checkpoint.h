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

#ifndef DADP_NNMATH_CHECKPOINT_H_
#define DADP_NNMATH_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dadp/nnmath/mlp.h"

namespace dadp {

inline constexpr uint32_t kCheckpointVersion = 1;

// On-disk layout (little-endian):
//   "DADPCKPT" | u32 version | str module_tag | u32 network_count
//   per network: str name | u32 n_dims | u32 dims[n_dims]
//                | f32 W0 (row-major) | f32 b0 | f32 W1 | ...
//   metadata:    u64 seed | u64 config_hash | u32 n | (str key, str value)*
//                | u32 m | (str name, u32 len, f64 values[len])*
// where str is a u32 byte count followed by the bytes.
struct Checkpoint {
  std::string module_tag;
  uint64_t seed = 0;
  uint64_t config_hash = 0;
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<std::string, Mlp>> networks;
  std::map<std::string, std::vector<double>> arrays;

  const Mlp& network(const std::string& name) const;
  const std::vector<double>& array(const std::string& name) const;
  const std::string& meta(const std::string& key) const;
};

std::vector<char> SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(std::span<const char> bytes);

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace dadp

#endif  // DADP_NNMATH_CHECKPOINT_H_
