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

#include "dadp/mixdiff/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dadp/errors.h"

namespace dadp {

double ScheduleAlpha(double k) { return std::cos(0.5 * std::numbers::pi * k); }
double ScheduleSigma(double k) { return std::sin(0.5 * std::numbers::pi * k); }

double FlooredAlpha(double k) {
  return std::max(ScheduleAlpha(k), kScheduleFloor);
}
double FlooredSigma(double k) {
  return std::max(ScheduleSigma(k), kScheduleFloor);
}

std::vector<double> InferenceGrid(int steps, double k_max) {
  if (steps < 1) throw ValidationError("inference steps must be at least 1");
  if (!(k_max > 0.0 && k_max <= 1.0)) {
    throw ValidationError("k_max must lie in (0, 1]");
  }
  std::vector<double> grid(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    grid[i] = k_max * static_cast<double>(steps - i) / steps;
  }
  return grid;
}

}  // namespace dadp
