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

#ifndef DADP_NNMATH_LOSS_H_
#define DADP_NNMATH_LOSS_H_

#include <span>

#include <Eigen/Core>

namespace dadp {

// Mean squared error averaged over every element of the batch. When `grad`
// is non-null it receives d(loss)/d(pred).
double Mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
           Eigen::MatrixXd* grad = nullptr);

// Softmax cross-entropy averaged over the batch. logits is K x N, labels has
// N entries in [0, K).
double SoftmaxCrossEntropy(const Eigen::MatrixXd& logits,
                           std::span<const int> labels,
                           Eigen::MatrixXd* grad = nullptr);

}  // namespace dadp

#endif  // DADP_NNMATH_LOSS_H_
