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

#include "dadp/dyncore/envs.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dadp/errors.h"

namespace dadp {

std::string_view EnvName(EnvId env) {
  switch (env) {
    case EnvId::kBallDrop:
      return "balldrop";
    case EnvId::kPush1D:
      return "push1d";
  }
  return "unknown";
}

EnvId ParseEnvId(std::string_view name) {
  if (name == "balldrop") return EnvId::kBallDrop;
  if (name == "push1d") return EnvId::kPush1D;
  throw ValidationError("unknown environment '" + std::string(name) + "'");
}

int ParamDim(EnvId env) { return env == EnvId::kBallDrop ? 1 : 2; }

void DomainSpec::Validate() const {
  const size_t dim = static_cast<size_t>(ParamDim(env));
  if (params.size() != dim || bounds.size() != dim) {
    throw ValidationError(std::string(EnvName(env)) + " expects " +
                          std::to_string(dim) + " parameters");
  }
  for (size_t i = 0; i < dim; ++i) {
    if (!std::isfinite(params[i]) || !bounds[i].Contains(params[i])) {
      throw ValidationError("parameter " + std::to_string(i) + " = " +
                            std::to_string(params[i]) + " outside [" +
                            std::to_string(bounds[i].lo) + ", " +
                            std::to_string(bounds[i].hi) + "]");
    }
  }
}

EnvState StepBallDrop(const EnvState& state, double t0, double g) {
  if (!(t0 > 0.0)) throw ValidationError("BallDrop time step must be positive");
  return {state.position + state.velocity * t0 + 0.5 * g * t0 * t0,
          state.velocity + g * t0};
}

EnvState StepPush1D(const EnvState& state, double u, double m, double c,
                    double dt, double u_max) {
  if (!(m > 0.0) || !(c >= 0.0) || !(dt > 0.0)) {
    throw ValidationError("Push1D requires m > 0, c >= 0, dt > 0");
  }
  if (!(std::abs(u) <= u_max)) {
    throw ValidationError("Push1D action " + std::to_string(u) +
                          " outside [-u_max, u_max]");
  }
  const double v = state.velocity + dt * (u - c * state.velocity) / m;
  return {state.position + dt * v, v};
}

double Push1DReward(double x_next, double u, double x_target) {
  const double e = x_next - x_target;
  return -e * e - 0.01 * u * u;
}

double ExpertActionPush1D(const EnvState& state, double m, double c,
                          const Push1DConfig& config) {
  const double u = m * (config.kp * (config.x_target - state.position) -
                        config.kd * state.velocity) +
                   c * state.velocity;
  return std::clamp(u, -config.u_max, config.u_max);
}

EnvState SampleInitialState(EnvId env, const EnvConfig& config, Rng& rng) {
  const BallDropConfig& balldrop = config.balldrop;
  const Push1DConfig& push1d = config.push1d;
  EnvState s;
  if (env == EnvId::kBallDrop) {
    s.position = rng.Uniform(balldrop.y0.lo, balldrop.y0.hi);
    s.velocity = rng.Uniform(balldrop.v0.lo, balldrop.v0.hi);
  } else {
    s.position = rng.Uniform(push1d.x0.lo, push1d.x0.hi);
    s.velocity = rng.Uniform(push1d.v0.lo, push1d.v0.hi);
  }
  return s;
}

namespace {

std::vector<double> Linspace(const Interval& iv, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = n == 1 ? 0.5 * (iv.lo + iv.hi)
                    : iv.lo + iv.width() * static_cast<double>(i) / (n - 1);
  }
  return out;
}

}  // namespace

std::vector<DomainSpec> TrainingGrid(EnvId env, int count,
                                     const EnvConfig& config) {
  const BallDropConfig& balldrop = config.balldrop;
  const Push1DConfig& push1d = config.push1d;
  if (count < 1) throw ValidationError("grid needs at least one domain");
  std::vector<DomainSpec> grid;
  if (env == EnvId::kBallDrop) {
    for (double g : Linspace(balldrop.gravity, count)) {
      grid.push_back({env, {g}, {balldrop.gravity}});
    }
    return grid;
  }
  const int side = static_cast<int>(std::lround(std::sqrt(count)));
  if (side * side != count) {
    throw ValidationError("Push1D grid size must be a perfect square, got " +
                          std::to_string(count));
  }
  for (double m : Linspace(push1d.mass, side)) {
    for (double c : Linspace(push1d.damping, side)) {
      grid.push_back({env, {m, c}, {push1d.mass, push1d.damping}});
    }
  }
  return grid;
}

std::vector<DomainSpec> SampleOodDomains(const std::vector<DomainSpec>& grid,
                                         int count, uint64_t seed) {
  if (grid.empty()) throw ValidationError("OOD sampling needs a grid");
  Rng rng(seed);
  std::vector<DomainSpec> out;
  const auto& bounds = grid.front().bounds;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 100000) throw ValidationError("cannot place OOD domains");
    DomainSpec d{grid.front().env, {}, bounds};
    for (const auto& b : bounds) d.params.push_back(rng.Uniform(b.lo, b.hi));
    bool near_grid = false;
    for (const auto& g : grid) {
      bool close = true;
      for (size_t i = 0; i < bounds.size(); ++i) {
        if (std::abs(g.params[i] - d.params[i]) > 0.05 * bounds[i].width()) {
          close = false;
        }
      }
      near_grid = near_grid || close;
    }
    if (!near_grid) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace dadp
