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

#include "dadp/dyncore/oracle.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "dadp/errors.h"

namespace dadp {

GravityFit FitGFromContext(std::span<const double, 3> y, double t0) {
  if (!(t0 > 0.0)) throw ValidationError("time step must be positive");
  return {(y[2] + y[0] - 2.0 * y[1]) / (t0 * t0),
          (3.0 * y[2] - 4.0 * y[1] + y[0]) / (2.0 * t0)};
}

double BallDropPosteriorVelocity(double y, double g, int episode_len,
                                 const BallDropConfig& config) {
  const double a = config.y0.lo, b = config.y0.hi;
  const double c = config.v0.lo, d = config.v0.hi;
  const double w = b - a, h = d - c;
  const double tol = 1e-9 * (1.0 + std::abs(y));

  // Each admissible step contributes a likelihood p(y | t) and the posterior
  // mean of v0 given (t, y). Degenerate (zero-width) ranges turn the
  // likelihood into a point mass, which dominates any density.
  double weight_sum = 0.0, weighted_v = 0.0;
  double delta_count = 0.0, delta_v = 0.0;
  for (int t = 0; t <= episode_len - 2; ++t) {
    const double tau = t * config.t0;
    const double fall = 0.5 * g * tau * tau;
    double weight = 0.0, mean_v0 = 0.0;
    bool delta = false;
    if (tau == 0.0) {
      mean_v0 = 0.5 * (c + d);
      if (w > 0.0) {
        weight = (y >= a && y <= b) ? 1.0 / w : 0.0;
      } else {
        delta = std::abs(y - a) <= tol;
      }
    } else if (w > 0.0 && h > 0.0) {
      const double lo = std::max(c, (y - fall - b) / tau);
      const double hi = std::min(d, (y - fall - a) / tau);
      if (hi > lo) {
        weight = (hi - lo) / (w * h);
        mean_v0 = 0.5 * (lo + hi);
      }
    } else if (w > 0.0) {
      const double y0 = y - c * tau - fall;
      weight = (y0 >= a && y0 <= b) ? 1.0 / w : 0.0;
      mean_v0 = c;
    } else if (h > 0.0) {
      const double v0 = (y - a - fall) / tau;
      weight = (v0 >= c && v0 <= d) ? 1.0 / (h * tau) : 0.0;
      mean_v0 = v0;
    } else {
      delta = std::abs(y - (a + c * tau + fall)) <= tol;
      mean_v0 = c;
    }
    const double v_t = mean_v0 + g * tau;
    if (delta) {
      delta_count += 1.0;
      delta_v += v_t;
    } else if (weight > 0.0) {
      weight_sum += weight;
      weighted_v += weight * v_t;
    }
  }
  if (delta_count > 0.0) return delta_v / delta_count;
  if (weight_sum > 0.0) return weighted_v / weight_sum;
  throw ValidationError("position outside the support of the generating distribution");
}

double BallDropOracleMse(const Dataset& dataset, const LagRule& lag,
                         int history, const BallDropConfig& config,
                         std::span<const EpisodeRef> episodes,
                         BallDropPredictor predictor) {
  if (dataset.env != EnvId::kBallDrop) {
    throw ValidationError("BallDrop oracle requires a BallDrop dataset");
  }
  if (history < 3) throw ValidationError("oracle needs a context of >= 3 steps");
  const double t0 = config.t0;
  double sum = 0.0;
  long count = 0;

  if (!lag.infinite) {
    for (const auto& ref : episodes) {
      const auto& ep = dataset.domains[ref.domain].episodes[ref.episode];
      for (int t = history - 1 + lag.steps; t <= ep.length - 2; ++t) {
        const int end = t - lag.steps;
        const std::array<double, 3> y = {ep.obs(end - 2), ep.obs(end - 1),
                                         ep.obs(end)};
        const GravityFit fit = FitGFromContext(y, t0);
        const double v_t = fit.v_last + fit.g * (t - end) * t0;
        const double pred = ep.obs(t) + v_t * t0 + 0.5 * fit.g * t0 * t0;
        const double e = pred - ep.obs(t + 1);
        sum += e * e;
        ++count;
      }
    }
    if (count == 0) throw ValidationError("no admissible prediction tuples");
    return sum / static_cast<double>(count);
  }

  std::map<int, double> mean_velocity;
  if (predictor == BallDropPredictor::kDomainMeanVelocity) {
    std::map<int, std::pair<double, long>> acc;
    for (const auto& ref : episodes) {
      const auto& ep = dataset.domains[ref.domain].episodes[ref.episode];
      const double g = dataset.domains[ref.domain].params[0];
      for (int t = 0; t <= ep.length - 2; ++t) {
        const double v = (ep.obs(t + 1) - ep.obs(t)) / t0 - 0.5 * g * t0;
        acc[ref.domain].first += v;
        acc[ref.domain].second += 1;
      }
    }
    for (const auto& [di, s] : acc) mean_velocity[di] = s.first / s.second;
  }

  for (const auto& ref : episodes) {
    const auto& ep = dataset.domains[ref.domain].episodes[ref.episode];
    const double g = dataset.domains[ref.domain].params[0];
    for (int t = 0; t <= ep.length - 2; ++t) {
      const double y = ep.obs(t);
      const double v = predictor == BallDropPredictor::kConditionalMean
                           ? BallDropPosteriorVelocity(y, g, ep.length, config)
                           : mean_velocity[ref.domain];
      const double e = y + v * t0 + 0.5 * g * t0 * t0 - ep.obs(t + 1);
      sum += e * e;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("no prediction tuples");
  return sum / static_cast<double>(count);
}

}  // namespace dadp
