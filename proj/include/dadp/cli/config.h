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

#ifndef DADP_CLI_CONFIG_H_
#define DADP_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dadp/dyncore/envs.h"
#include "dadp/encoder/encoder.h"
#include "dadp/encoder/probe.h"
#include "dadp/mixdiff/denoiser.h"
#include "dadp/mixdiff/policy.h"
#include "dadp/rollout/policies.h"

namespace dadp {

struct EnvBlock {
  EnvId env = EnvId::kPush1D;
  int grid_size = 9;
  int ood_count = 5;
  int episodes_per_domain = 20;
  EnvConfig physics;
};

struct EncoderBlock {
  LagRule lag = LagRule::Infinite();
  EncoderOptions options;
  std::vector<LagRule> probe_lags;
  int probe_stride = 4;
};

struct PolicyBlock {
  std::vector<Variant> variants{Variant::kFull};
  PolicyConfig config;  // variant field unused; see `variants`
  PolicyTrainOptions train;
};

enum class SweepMode { kSampling, kRetrain };

struct EvalBlock {
  int episodes_per_domain = 20;
  std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  ContextMode context_source = ContextMode::kColdStart;
  bool compare_contexts = false;
  std::vector<double> sweep_lambdas{0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0};
  SweepMode sweep_mode = SweepMode::kSampling;
};

struct ExperimentConfig {
  uint64_t seed = 0;
  std::filesystem::path output_dir = "runs/default";
  EnvBlock env;
  EncoderBlock encoder;
  PolicyBlock policy;
  EvalBlock eval;

  // H + F, the shortest admissible episode.
  int min_episode_len() const {
    return encoder.options.history + policy.config.future;
  }
};

// Parses YAML text. Unknown keys, wrong types and out-of-range values raise
// ValidationError whose message starts with "<source>:<line>: ".
ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& source = "config");
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Cross-field checks (bounds, window lengths, lag admissibility).
void ValidateConfig(const ExperimentConfig& config);

// Canonical key=value rendering of every setting; the hashes below are
// FNV-1a over prefixes of it, so each pipeline stage depends only on the
// blocks upstream of it.
std::string CanonicalText(const ExperimentConfig& config);
uint64_t ConfigHash(const ExperimentConfig& config);
uint64_t DataStageHash(const ExperimentConfig& config);
uint64_t EncoderStageHash(const ExperimentConfig& config);
uint64_t PolicyStageHash(const ExperimentConfig& config);

std::string SweepModeName(SweepMode mode);

}  // namespace dadp

#endif  // DADP_CLI_CONFIG_H_
