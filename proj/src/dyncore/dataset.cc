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

#include "dadp/dyncore/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dadp/errors.h"
#include "dadp/nnmath/parallel.h"
#include "dadp/nnmath/rng.h"

namespace dadp {

int Dataset::TrajectoryCount() const {
  int n = 0;
  for (const auto& d : domains) n += static_cast<int>(d.episodes.size());
  return n;
}

void Dataset::Validate(int min_len) const {
  if (domains.empty()) throw ValidationError("dataset has no domains");
  for (size_t di = 0; di < domains.size(); ++di) {
    const auto& d = domains[di];
    if (static_cast<int>(d.params.size()) != param_dim) {
      throw ValidationError("domain " + std::to_string(di) +
                            " has a malformed parameter vector");
    }
    if (d.episodes.size() < 2) {
      throw ValidationError("domain " + std::to_string(di) +
                            " needs at least two episodes");
    }
    for (const auto& ep : d.episodes) {
      if (ep.length < min_len) {
        throw ValidationError("episode shorter than the window length " +
                              std::to_string(min_len));
      }
      if (ep.obs_dim != obs_dim || ep.act_dim != act_dim ||
          ep.observations.size() != static_cast<size_t>(ep.length * obs_dim) ||
          ep.actions.size() != static_cast<size_t>(ep.length * act_dim) ||
          ep.rewards.size() != static_cast<size_t>(ep.length)) {
        throw ValidationError("episode shape does not match the dataset");
      }
      for (double r : ep.rewards) {
        if (!std::isfinite(r)) throw ValidationError("non-finite reward");
      }
    }
  }
}

LagRule LagRule::Finite(int steps) {
  if (steps < 1) throw ValidationError("finite lag must be >= 1");
  return {false, steps};
}

LagRule LagRule::Parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return Infinite();
  size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0) {
    throw ValidationError("lag must be a positive integer or 'inf', got '" +
                          text + "'");
  }
  return Finite(v);
}

std::string LagRule::ToString() const {
  return infinite ? "inf" : std::to_string(steps);
}

Trajectory SimulateExpertEpisode(const DomainSpec& domain, EnvState initial,
                                 int episode_len, const EnvConfig& config) {
  Trajectory traj;
  traj.length = episode_len;
  traj.obs_dim = 1;
  traj.act_dim = domain.env == EnvId::kBallDrop ? 0 : 1;
  EnvState s = initial;
  for (int t = 0; t < episode_len; ++t) {
    traj.observations.push_back(s.observation());
    if (domain.env == EnvId::kBallDrop) {
      s = StepBallDrop(s, config.balldrop.t0, domain.params[0]);
      traj.rewards.push_back(0.0);
    } else {
      const auto& p = config.push1d;
      const double m = domain.params[0], c = domain.params[1];
      const double u = ExpertActionPush1D(s, m, c, p);
      s = StepPush1D(s, u, m, c, p.dt, p.u_max);
      traj.actions.push_back(u);
      traj.rewards.push_back(Push1DReward(s.position, u, p.x_target));
    }
  }
  return traj;
}

Dataset GenerateDataset(const std::vector<DomainSpec>& grid,
                        int episodes_per_domain, int episode_len,
                        uint64_t seed, const EnvConfig& config, int min_len,
                        int threads) {
  if (grid.empty()) throw ValidationError("empty domain grid");
  if (episodes_per_domain < 2) {
    throw ValidationError("need at least two episodes per domain");
  }
  if (episode_len < min_len) {
    throw ValidationError("episode_len " + std::to_string(episode_len) +
                          " shorter than window length " +
                          std::to_string(min_len));
  }
  Dataset ds;
  ds.env = grid.front().env;
  ds.obs_dim = 1;
  ds.act_dim = ds.env == EnvId::kBallDrop ? 0 : 1;
  ds.param_dim = ParamDim(ds.env);
  for (const auto& d : grid) {
    if (d.env != ds.env) throw ValidationError("grid mixes environments");
    d.Validate();
  }
  ds.domains.resize(grid.size());

  auto fill = [&](size_t di) {
    Rng rng(DeriveSeed(seed, di));
    DomainData& out = ds.domains[di];
    out.params = grid[di].params;
    for (int e = 0; e < episodes_per_domain; ++e) {
      const EnvState init = SampleInitialState(ds.env, config, rng);
      out.episodes.push_back(
          SimulateExpertEpisode(grid[di], init, episode_len, config));
    }
  };
  ParallelFor(static_cast<int>(grid.size()), threads,
              [&](int di) { fill(static_cast<size_t>(di)); });
  return ds;
}

TrajectorySplit SplitByTrajectory(const Dataset& dataset, double train_ratio,
                                  uint64_t seed, int min_per_side) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw ValidationError("train ratio must lie in (0, 1)");
  }
  TrajectorySplit split;
  for (size_t di = 0; di < dataset.domains.size(); ++di) {
    const int n = static_cast<int>(dataset.domains[di].episodes.size());
    if (n < 2 * min_per_side) {
      throw ValidationError("domain " + std::to_string(di) + " has too few episodes to split");
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(seed, di, 0x5b117));
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.UniformInt(static_cast<uint64_t>(i) + 1)]);
    }
    int n_train = static_cast<int>(std::lround(train_ratio * n));
    n_train = std::clamp(n_train, min_per_side, n - min_per_side);
    std::sort(order.begin(), order.begin() + n_train);
    std::sort(order.begin() + n_train, order.end());
    for (int i = 0; i < n; ++i) {
      (i < n_train ? split.train : split.validation)
          .push_back({static_cast<int>(di), order[i]});
    }
  }
  return split;
}

std::vector<EpisodeRef> AllEpisodes(const Dataset& dataset) {
  std::vector<EpisodeRef> refs;
  for (size_t di = 0; di < dataset.domains.size(); ++di) {
    for (size_t e = 0; e < dataset.domains[di].episodes.size(); ++e) {
      refs.push_back({static_cast<int>(di), static_cast<int>(e)});
    }
  }
  return refs;
}

}  // namespace dadp
