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

#ifndef DADP_NNMATH_ADAM_H_
#define DADP_NNMATH_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dadp/nnmath/tensor.h"

namespace dadp {

struct AdamOptions {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment optimizer with bias correction. One moment pair per
// parameter tensor; the tensor list passed to Step must keep the order and
// sizes given at construction.
class Adam {
 public:
  Adam(AdamOptions options, std::span<const TensorView> params);

  // Throws ValidationError on a shape mismatch and NumericError naming the
  // first gradient tensor that holds a non-finite value. Parameters are left
  // untouched when an error is raised.
  void Step(std::span<const TensorView> params,
            std::span<const ConstTensorView> grads);

  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  double learning_rate() const { return options_.learning_rate; }
  int64_t step_count() const { return step_; }

 private:
  AdamOptions options_;
  std::vector<Eigen::VectorXd> first_;
  std::vector<Eigen::VectorXd> second_;
  int64_t step_ = 0;
};

}  // namespace dadp

#endif  // DADP_NNMATH_ADAM_H_
