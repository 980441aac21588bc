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

#include "dadp/encoder/context.h"

#include <cmath>
#include <map>
#include <string>

#include "dadp/errors.h"
#include "dadp/nnmath/rng.h"

namespace dadp {

Standardizer Standardizer::Fit(std::span<const double> values, int dim) {
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.scale.assign(dim, 1.0);
  if (dim == 0) return s;
  const size_t n = values.size() / dim;
  if (n == 0) return s;
  for (size_t r = 0; r < n; ++r) {
    for (int i = 0; i < dim; ++i) s.mean[i] += values[r * dim + i];
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(dim, 0.0);
  for (size_t r = 0; r < n; ++r) {
    for (int i = 0; i < dim; ++i) {
      const double d = values[r * dim + i] - s.mean[i];
      var[i] += d * d;
    }
  }
  for (int i = 0; i < dim; ++i) {
    const double sd = std::sqrt(var[i] / static_cast<double>(n));
    s.scale[i] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

TokenScaler TokenScaler::Fit(const Dataset& dataset,
                             std::span<const EpisodeRef> episodes) {
  std::vector<double> obs, act, delta;
  for (const auto& ref : episodes) {
    const auto& ep = dataset.domains[ref.domain].episodes[ref.episode];
    obs.insert(obs.end(), ep.observations.begin(), ep.observations.end());
    act.insert(act.end(), ep.actions.begin(), ep.actions.end());
    for (int t = 0; t + 1 < ep.length; ++t) {
      for (int i = 0; i < ep.obs_dim; ++i) {
        delta.push_back(ep.obs(t + 1, i) - ep.obs(t, i));
      }
    }
  }
  return {Standardizer::Fit(obs, dataset.obs_dim),
          Standardizer::Fit(act, dataset.act_dim),
          Standardizer::Fit(delta, dataset.obs_dim)};
}

void FillTrajectoryContext(const Trajectory& ep, int end_step, int history,
                           const TokenScaler& scaler,
                           Eigen::Ref<Eigen::VectorXd> out) {
  const int obs_dim = ep.obs_dim, act_dim = ep.act_dim;
  const int tok = obs_dim + act_dim;
  if (out.size() != history * tok) {
    throw ValidationError("context buffer has the wrong size");
  }
  if (end_step < -1 || end_step >= ep.length) {
    throw ValidationError("context end step outside the episode");
  }
  for (int r = 0; r < history; ++r) {
    const int step = end_step - history + 1 + r;
    for (int i = 0; i < tok; ++i) {
      double v = 0.0;
      if (step >= 0) {
        v = i < obs_dim ? scaler.obs.Apply(ep.obs(step, i), i)
                        : scaler.act.Apply(ep.action(step, i - obs_dim), i - obs_dim);
      }
      out[r * tok + i] = v;
    }
  }
}

void FillContextFeatures(const Dataset& dataset, const EpisodeRef& ref,
                         int end_step, int history, const TokenScaler& scaler,
                         Eigen::Ref<Eigen::VectorXd> out) {
  FillTrajectoryContext(dataset.domains[ref.domain].episodes[ref.episode],
                        end_step, history, scaler, out);
}

ContextWindow ExtractContext(const Dataset& dataset, const EpisodeRef& ref,
                             int end_step, int history,
                             const TokenScaler& scaler) {
  ContextWindow w;
  w.features.resize(history * dataset.token_dim());
  FillContextFeatures(dataset, ref, end_step, history, scaler, w.features);
  w.domain = ref.domain;
  w.episode = ref.episode;
  w.end_step = end_step;
  return w;
}

std::vector<ContextPair> BuildPairs(const Dataset& dataset,
                                    std::span<const EpisodeRef> episodes,
                                    const LagRule& lag, int history,
                                    uint64_t seed) {
  if (history < 1) throw ValidationError("history must be positive");
  std::vector<ContextPair> pairs;
  if (!lag.infinite) {
    for (const auto& ref : episodes) {
      const int len = dataset.domains[ref.domain].episodes[ref.episode].length;
      for (int t = history - 1 + lag.steps; t <= len - 2; ++t) {
        pairs.push_back({ref, t - lag.steps, ref, t});
      }
    }
    if (pairs.empty()) {
      throw ValidationError("lag " + lag.ToString() + " with history " +
                            std::to_string(history) +
                            " leaves no admissible prediction step");
    }
    return pairs;
  }

  std::map<int, std::vector<int>> by_domain;
  for (const auto& ref : episodes) by_domain[ref.domain].push_back(ref.episode);
  for (const auto& [domain, eps] : by_domain) {
    if (eps.size() < 2) {
      throw ValidationError("infinite lag needs two episodes in domain " +
                            std::to_string(domain));
    }
  }
  Rng rng(seed);
  for (const auto& ref : episodes) {
    const auto& eps = by_domain[ref.domain];
    const int len = dataset.domains[ref.domain].episodes[ref.episode].length;
    for (int t = 0; t <= len - 2; ++t) {
      // Uniform over the other listed episodes of this domain.
      size_t pick = rng.UniformInt(eps.size() - 1);
      if (eps[pick] == ref.episode) pick = eps.size() - 1;
      const EpisodeRef ctx{ref.domain, eps[pick]};
      const int ctx_len =
          dataset.domains[ctx.domain].episodes[ctx.episode].length;
      if (ctx_len < history) {
        throw ValidationError("episode shorter than the context window");
      }
      const int end = history - 1 +
                      static_cast<int>(rng.UniformInt(ctx_len - history + 1));
      pairs.push_back({ctx, end, ref, t});
    }
  }
  if (pairs.empty()) throw ValidationError("no prediction tuples");
  return pairs;
}

}  // namespace dadp
