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

#include "dadp/nnmath/adam.h"

#include <cmath>
#include <string>

#include "dadp/errors.h"

namespace dadp {

Adam::Adam(AdamOptions options, std::span<const TensorView> params)
    : options_(options) {
  for (const auto& p : params) {
    first_.push_back(Eigen::VectorXd::Zero(p.size));
    second_.push_back(Eigen::VectorXd::Zero(p.size));
  }
}

void Adam::Step(std::span<const TensorView> params,
                std::span<const ConstTensorView> grads) {
  if (params.size() != first_.size() || grads.size() != first_.size()) {
    throw ValidationError("Adam: expected " + std::to_string(first_.size()) +
                          " tensors");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].size != first_[i].size() || grads[i].size != params[i].size) {
      throw ValidationError("Adam: size mismatch for tensor " + params[i].name);
    }
    Eigen::Map<const Eigen::VectorXd> g(grads[i].data, grads[i].size);
    if (!g.allFinite()) {
      throw NumericError("non-finite gradient in tensor " + grads[i].name);
    }
  }
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double step_size = options_.learning_rate / correction1;
  for (size_t i = 0; i < params.size(); ++i) {
    Eigen::Map<Eigen::VectorXd> w(params[i].data, params[i].size);
    Eigen::Map<const Eigen::VectorXd> g(grads[i].data, grads[i].size);
    first_[i] = b1 * first_[i] + (1.0 - b1) * g;
    second_[i] = b2 * second_[i] + (1.0 - b2) * g.cwiseAbs2();
    w.array() -= step_size * first_[i].array() /
                 ((second_[i].array() / correction2).sqrt() + options_.epsilon);
  }
}

}  // namespace dadp
