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

#ifndef DADP_MIXDIFF_SCHEDULE_H_
#define DADP_MIXDIFF_SCHEDULE_H_

#include <vector>

namespace dadp {

// Continuous-time cosine schedule on k in [0, 1]:
//   alpha(k) = cos(pi k / 2), sigma(k) = sin(pi k / 2).
// The raw values are used everywhere except as divisors, where they are
// floored at kScheduleFloor.
inline constexpr double kScheduleFloor = 1e-3;
inline constexpr double kMaxInferenceK = 0.999;

double ScheduleAlpha(double k);
double ScheduleSigma(double k);
double FlooredAlpha(double k);
double FlooredSigma(double k);

// steps + 1 uniformly spaced points from k_max down to exactly 0.
std::vector<double> InferenceGrid(int steps, double k_max = kMaxInferenceK);

}  // namespace dadp

#endif  // DADP_MIXDIFF_SCHEDULE_H_
