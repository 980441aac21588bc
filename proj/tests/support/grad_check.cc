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

#include "support/grad_check.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dadp/nnmath/rng.h"

namespace dadp::testing {

double CorrectedRelativeError(double a, double b, double tol) {
  const double num = std::max(0.0, std::abs(a - b) - tol);
  return num / (std::abs(a) + std::abs(b) + tol);
}

GradCheckResult CheckGradients(const std::function<double()>& loss,
                               std::span<const TensorView> params,
                               std::span<const ConstTensorView> grads,
                               uint64_t seed, int coords, double step) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("parameter and gradient lists differ");
  }
  GradCheckResult result;
  Rng rng(seed);
  for (size_t t = 0; t < params.size(); ++t) {
    const TensorView& p = params[t];
    const ConstTensorView& g = grads[t];
    if (p.size != g.size) {
      throw std::invalid_argument("size mismatch for " + p.name);
    }
    std::vector<Eigen::Index> picks;
    if (p.size <= coords) {
      for (Eigen::Index i = 0; i < p.size; ++i) picks.push_back(i);
    } else {
      for (int i = 0; i < coords; ++i) {
        picks.push_back(static_cast<Eigen::Index>(rng.UniformInt(p.size)));
      }
    }
    for (Eigen::Index i : picks) {
      const double saved = p.data[i];
      p.data[i] = saved + step;
      const double up = loss();
      p.data[i] = saved - step;
      const double down = loss();
      p.data[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = CorrectedRelativeError(g.data[i], numeric);
      ++result.checked;
      result.max_abs_diff =
          std::max(result.max_abs_diff, std::abs(g.data[i] - numeric));
      if (result.worst.empty() || err > result.max_error) {
        result.max_error = err;
        result.worst = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace dadp::testing
