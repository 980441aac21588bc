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

#ifndef DADP_ROLLOUT_ROLLOUT_H_
#define DADP_ROLLOUT_ROLLOUT_H_

#include <cstdint>

#include "dadp/dyncore/dataset.h"
#include "dadp/dyncore/envs.h"
#include "dadp/rollout/policies.h"

namespace dadp {

struct EpisodeResult {
  double episode_return = 0.0;
  Trajectory trajectory;
};

// Runs one Push1D episode of config.push1d.episode_len steps from
// `initial`. Actions are applied as returned; out-of-range actions raise
// ValidationError from the simulator.
EpisodeResult RolloutEpisode(const Policy& policy, const DomainSpec& domain,
                             const EnvConfig& config, const EnvState& initial,
                             const ContextSource& source, uint64_t seed);

}  // namespace dadp

#endif  // DADP_ROLLOUT_ROLLOUT_H_
