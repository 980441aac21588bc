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

#include "dadp/rollout/rollout.h"

#include "dadp/errors.h"

namespace dadp {

EpisodeResult RolloutEpisode(const Policy& policy, const DomainSpec& domain,
                             const EnvConfig& config, const EnvState& initial,
                             const ContextSource& source, uint64_t seed) {
  if (domain.env != EnvId::kPush1D) {
    throw ValidationError("rollouts need an environment with actions");
  }
  domain.Validate();
  const Push1DConfig& pc = config.push1d;
  const int len = pc.episode_len;
  if (len < 1) throw ValidationError("episode length must be positive");

  EpisodeResult res;
  Trajectory& tr = res.trajectory;
  tr.length = len;
  tr.obs_dim = 1;
  tr.act_dim = 1;
  tr.observations.assign(len, 0.0);
  tr.actions.assign(len, 0.0);
  tr.rewards.assign(len, 0.0);

  const auto session = policy.Begin(domain, source, seed);
  EnvState state = initial;
  const double m = domain.params[0], c = domain.params[1];
  for (int t = 0; t < len; ++t) {
    tr.observations[t] = state.observation();
    const double u = session->Act({t, &tr, state});
    const EnvState next = StepPush1D(state, u, m, c, pc.dt, pc.u_max);
    tr.actions[t] = u;
    tr.rewards[t] = Push1DReward(next.position, u, pc.x_target);
    res.episode_return += tr.rewards[t];
    state = next;
  }
  return res;
}

}  // namespace dadp
