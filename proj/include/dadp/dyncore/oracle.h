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

#ifndef DADP_DYNCORE_ORACLE_H_
#define DADP_DYNCORE_ORACLE_H_

#include <span>
#include <vector>

#include "dadp/dyncore/dataset.h"

namespace dadp {

struct GravityFit {
  double g = 0.0;
  double v_last = 0.0;  // velocity at the last of the three samples
};

// From three consecutive noiseless positions (y_{T-2}, y_{T-1}, y_T):
//   g   = (y_T + y_{T-2} - 2 y_{T-1}) / t0^2
//   v_T = (3 y_T - 4 y_{T-1} + y_{T-2}) / (2 t0)
// The velocity uses the standard second-order backward difference, which is
// exact for constant acceleration.
GravityFit FitGFromContext(std::span<const double, 3> y, double t0);

enum class BallDropPredictor {
  // Bayes-optimal prediction of y_{t+1} from (y_t, g) under the generating
  // distribution: uniform step index over the admissible targets and uniform
  // (y0, v0) over the configured rectangle. The hidden velocity enters only
  // through its posterior mean E[v_t | y_t, g].
  kConditionalMean,
  // y_{t+1} = y_t + vbar_D t0 + g t0^2 / 2 with vbar_D the mean velocity over
  // the domain's prediction tuples; ignores what y_t reveals about v_t.
  kDomainMeanVelocity,
};

// Prediction MSE (raw position units) of the best predictor allowed by the
// lag rule, enumerated over every prediction tuple of the selected episodes.
// Finite lags: the context's last three positions determine g and the
// velocity exactly, which is extended to step t (MSE is zero up to rounding).
// Infinite lag: targets are all t in [0, L-2] and `predictor` is used.
// `history` is the context length; finite lags use t in
// [history - 1 + lag, L - 2]. Throws ValidationError for non-BallDrop data.
double BallDropOracleMse(
    const Dataset& dataset, const LagRule& lag, int history,
    const BallDropConfig& config, std::span<const EpisodeRef> episodes,
    BallDropPredictor predictor = BallDropPredictor::kConditionalMean);

// E[v_t | y_t = y, g] under the generating distribution described above.
double BallDropPosteriorVelocity(double y, double g, int episode_len,
                                 const BallDropConfig& config);

}  // namespace dadp

#endif  // DADP_DYNCORE_ORACLE_H_
