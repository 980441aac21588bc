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

#ifndef DADP_DYNCORE_DATASET_H_
#define DADP_DYNCORE_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dadp/dyncore/envs.h"

namespace dadp {

// One episode of (observation, action, reward) rows. The reward in row t is
// earned by the transition out of step t. BallDrop episodes have no action
// columns and zero rewards.
struct Trajectory {
  int length = 0;
  int obs_dim = 1;
  int act_dim = 1;
  std::vector<double> observations;  // length x obs_dim, row-major
  std::vector<double> actions;       // length x act_dim, row-major
  std::vector<double> rewards;       // length

  double obs(int t, int i = 0) const { return observations[t * obs_dim + i]; }
  double action(int t, int i = 0) const { return actions[t * act_dim + i]; }

  bool operator==(const Trajectory&) const = default;
};

struct DomainData {
  std::vector<double> params;  // xi; used only for evaluation and probing
  std::vector<Trajectory> episodes;

  bool operator==(const DomainData&) const = default;
};

struct Dataset {
  EnvId env = EnvId::kPush1D;
  int obs_dim = 1;
  int act_dim = 1;
  int param_dim = 1;
  std::vector<DomainData> domains;

  int TrajectoryCount() const;
  int token_dim() const { return obs_dim + act_dim; }

  // Checks shapes, finiteness, `min_len` episode length, and at least two
  // episodes per domain. Throws ValidationError.
  void Validate(int min_len) const;

  bool operator==(const Dataset&) const = default;
};

struct EpisodeRef {
  int domain = 0;
  int episode = 0;

  bool operator==(const EpisodeRef&) const = default;
};

// Lag between the end of a context window and the prediction step.
// Infinite lag draws the context from another episode of the same domain.
struct LagRule {
  bool infinite = false;
  int steps = 1;

  static LagRule Finite(int steps);
  static LagRule Infinite() { return {true, 0}; }
  // "inf" or a positive integer.
  static LagRule Parse(const std::string& text);
  std::string ToString() const;

  bool operator==(const LagRule&) const = default;
};

// Expert (or free-fall) rollouts on every domain of the grid. Per-domain
// generators are seeded from DeriveSeed(seed, domain) so the result does not
// depend on `threads`. Throws ValidationError if episode_len < min_len or
// episodes_per_domain < 2.
Dataset GenerateDataset(const std::vector<DomainSpec>& grid,
                        int episodes_per_domain, int episode_len,
                        uint64_t seed, const EnvConfig& config, int min_len,
                        int threads = 1);

// Simulates one episode from `initial` with the privileged expert (Push1D)
// or as a free fall (BallDrop).
Trajectory SimulateExpertEpisode(const DomainSpec& domain, EnvState initial,
                                 int episode_len, const EnvConfig& config);

struct TrajectorySplit {
  std::vector<EpisodeRef> train;
  std::vector<EpisodeRef> validation;
};

// Per-domain shuffle of episode indices; the first round(ratio * n) go to
// training. Both sides keep at least `min_per_side` episodes per domain.
TrajectorySplit SplitByTrajectory(const Dataset& dataset, double train_ratio,
                                  uint64_t seed, int min_per_side = 1);

std::vector<EpisodeRef> AllEpisodes(const Dataset& dataset);

}  // namespace dadp

#endif  // DADP_DYNCORE_DATASET_H_
