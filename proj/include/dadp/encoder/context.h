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

#ifndef DADP_ENCODER_CONTEXT_H_
#define DADP_ENCODER_CONTEXT_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dadp/dyncore/dataset.h"

namespace dadp {

// Per-dimension affine standardization fitted on training data.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  int dim() const { return static_cast<int>(mean.size()); }
  double Apply(double v, int i) const { return (v - mean[i]) / scale[i]; }
  double Invert(double v, int i) const { return v * scale[i] + mean[i]; }

  // `values` is row-major with `dim` columns. A zero spread keeps scale 1.
  static Standardizer Fit(std::span<const double> values, int dim);

  bool operator==(const Standardizer&) const = default;
};

// Statistics for observations, actions and one-step observation increments,
// all computed over the training episodes only.
struct TokenScaler {
  Standardizer obs;
  Standardizer act;
  Standardizer delta;

  static TokenScaler Fit(const Dataset& dataset,
                         std::span<const EpisodeRef> episodes);

  bool operator==(const TokenScaler&) const = default;
};

// H consecutive standardized (observation || action) rows, flattened
// row-major. Rows before the start of an episode are zero (the standardized
// mean).
struct ContextWindow {
  Eigen::VectorXd features;
  int domain = -1;
  int episode = -1;
  int end_step = -1;
};

// Same fill rule on a bare trajectory; only rows up to end_step are read.
void FillTrajectoryContext(const Trajectory& episode, int end_step,
                           int history, const TokenScaler& scaler,
                           Eigen::Ref<Eigen::VectorXd> out);

// Context ending at `end_step` (inclusive).
ContextWindow ExtractContext(const Dataset& dataset, const EpisodeRef& ref,
                             int end_step, int history,
                             const TokenScaler& scaler);

// Writes the same features as ExtractContext into `out` (size H * token_dim).
// end_step may be -1, giving an all-padding context.
void FillContextFeatures(const Dataset& dataset, const EpisodeRef& ref,
                         int end_step, int history, const TokenScaler& scaler,
                         Eigen::Ref<Eigen::VectorXd> out);

// Context taken from (context, context_end) and prediction tuple
// (s_t, a_t, s_{t+1}) taken from (target, t).
struct ContextPair {
  EpisodeRef context;
  int context_end = 0;
  EpisodeRef target;
  int t = 0;
};

// Finite lag: every t in [H - 1 + lag, L - 2] of every listed episode, with
// the context ending at t - lag in the same episode. Infinite lag: every t
// in [0, L - 2], with the context drawn uniformly from a different listed
// episode of the same domain and a uniform end step in [H - 1, L - 1].
// Deterministic in `seed`. Throws ValidationError when no admissible tuple
// exists or a domain has fewer than two listed episodes under infinite lag.
std::vector<ContextPair> BuildPairs(const Dataset& dataset,
                                    std::span<const EpisodeRef> episodes,
                                    const LagRule& lag, int history,
                                    uint64_t seed);

}  // namespace dadp

#endif  // DADP_ENCODER_CONTEXT_H_
