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

#ifndef DADP_TESTS_SUPPORT_GRAD_CHECK_H_
#define DADP_TESTS_SUPPORT_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "dadp/nnmath/tensor.h"

namespace dadp::testing {

struct GradCheckResult {
  double max_error = 0.0;
  std::string worst;  // "<tensor>[<index>]"
  int checked = 0;
  double max_abs_diff = 0.0;  // uncorrected |analytic - numeric|
};

// max(0, |a - b| - tol) / (|a| + |b| + tol), tolerant of entries that are
// zero up to rounding.
double CorrectedRelativeError(double a, double b, double tol = 1e-9);

// Compares `grads` against central differences of `loss` at `coords`
// random coordinates of every tensor in `params` (all of them when the
// tensor is smaller). `params` must alias the state `loss` reads.
GradCheckResult CheckGradients(const std::function<double()>& loss,
                               std::span<const TensorView> params,
                               std::span<const ConstTensorView> grads,
                               uint64_t seed, int coords = 20,
                               double step = 1e-5);

}  // namespace dadp::testing

#endif  // DADP_TESTS_SUPPORT_GRAD_CHECK_H_
