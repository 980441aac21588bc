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

#ifndef DADP_DYNCORE_ENVS_H_
#define DADP_DYNCORE_ENVS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dadp/nnmath/rng.h"

namespace dadp {

enum class EnvId : uint32_t { kBallDrop = 0, kPush1D = 1 };

std::string_view EnvName(EnvId env);
EnvId ParseEnvId(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

// Environment identifier plus the latent dynamics parameters.
// BallDrop: params = {g} in m/s^2. Push1D: params = {m [kg], c [N s/m]}.
struct DomainSpec {
  EnvId env = EnvId::kPush1D;
  std::vector<double> params;
  std::vector<Interval> bounds;

  // Throws ValidationError when the dimension is wrong for the environment
  // or a parameter lies outside its bounds.
  void Validate() const;
};

int ParamDim(EnvId env);

// Both systems carry [position, velocity]; only the position is observed.
struct EnvState {
  double position = 0.0;
  double velocity = 0.0;

  double observation() const { return position; }
};

struct BallDropConfig {
  double t0 = 1.0;
  Interval gravity{-2.0, -0.5};
  Interval y0{0.0, 1000.0};
  Interval v0{-1.0, 1.0};
  int episode_len = 32;
};

struct Push1DConfig {
  double dt = 0.05;
  double x_target = 1.0;
  double u_max = 3.0;
  double kp = 4.0;
  double kd = 3.0;
  Interval mass{0.5, 2.5};
  Interval damping{0.0, 2.0};
  Interval x0{-0.5, 0.5};
  Interval v0{-0.5, 0.5};
  int episode_len = 64;
};

struct EnvConfig {
  BallDropConfig balldrop;
  Push1DConfig push1d;

  int episode_len(EnvId env) const {
    return env == EnvId::kBallDrop ? balldrop.episode_len : push1d.episode_len;
  }
};

// Exact free fall: y' = y + v t0 + g t0^2 / 2, v' = v + g t0.
EnvState StepBallDrop(const EnvState& state, double t0, double g);

// Semi-implicit Euler: v' = v + dt (u - c v) / m, x' = x + dt v'.
// Throws ValidationError if |u| > u_max or the parameters are invalid.
EnvState StepPush1D(const EnvState& state, double u, double m, double c,
                    double dt, double u_max);

// -(x' - x*)^2 - 0.01 u^2
double Push1DReward(double x_next, double u, double x_target);

// Privileged PD expert compensating mass and damping:
// u = clip(m (kp (x* - x) - kd v) + c v, +-u_max).
double ExpertActionPush1D(const EnvState& state, double m, double c,
                          const Push1DConfig& config);

EnvState SampleInitialState(EnvId env, const EnvConfig& config, Rng& rng);

// Uniform training grids: BallDrop spaces `count` gravities over the bounds;
// Push1D uses a sqrt(count) x sqrt(count) (m, c) grid, count in {4, 9, 16, 25}.
std::vector<DomainSpec> TrainingGrid(EnvId env, int count,
                                     const EnvConfig& config);

// Uniform samples inside the bounds, rejecting any that fall within 5% of the
// bound width (per parameter, all coordinates) of a grid point.
std::vector<DomainSpec> SampleOodDomains(const std::vector<DomainSpec>& grid,
                                         int count, uint64_t seed);

}  // namespace dadp

#endif  // DADP_DYNCORE_ENVS_H_
