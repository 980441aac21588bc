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

#ifndef DADP_DYNCORE_DATASET_IO_H_
#define DADP_DYNCORE_DATASET_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dadp/dyncore/dataset.h"

namespace dadp {

inline constexpr uint32_t kDatasetFormatVersion = 1;

// Little-endian binary layout:
//   "DADP" | u32 version | u32 env_id | u32 state_dim | u32 action_dim
//   | u32 param_dim | u32 domain_count
//   per domain:  f64 xi[param_dim] | u32 episode_count
//   per episode: u32 length | f32 rows[length][state_dim + action_dim + 1]
// Rows are (observation || action || reward). Values are stored as f32, so
// a loaded dataset equals RoundDatasetToFloat of the one that was written.
std::vector<char> SerializeDataset(const Dataset& dataset);
Dataset ParseDataset(std::span<const char> bytes);

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset LoadDataset(const std::filesystem::path& path);

Dataset RoundDatasetToFloat(const Dataset& dataset);

// Columns: domain_index, xi_0.., episode_index, step, obs_0.., act_0..,
// reward. Values carry the f32 precision of the binary file.
std::string DatasetToCsv(const Dataset& dataset);

}  // namespace dadp

#endif  // DADP_DYNCORE_DATASET_IO_H_
