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

#include "dadp/nnmath/loss.h"

#include <cmath>

#include "dadp/errors.h"

namespace dadp {

double Mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
           Eigen::MatrixXd* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ValidationError("Mse: shape mismatch");
  }
  if (pred.size() == 0) {
    if (grad != nullptr) grad->resize(pred.rows(), pred.cols());
    return 0.0;
  }
  const double n = static_cast<double>(pred.size());
  const Eigen::MatrixXd diff = pred - target;
  if (grad != nullptr) *grad = (2.0 / n) * diff;
  return diff.squaredNorm() / n;
}

double SoftmaxCrossEntropy(const Eigen::MatrixXd& logits,
                           std::span<const int> labels, Eigen::MatrixXd* grad) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.cols()) {
    throw ValidationError("SoftmaxCrossEntropy: label count mismatch");
  }
  const Eigen::Index classes = logits.rows();
  const double n = static_cast<double>(logits.cols());
  if (grad != nullptr) grad->resize(classes, logits.cols());
  double total = 0.0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const int label = labels[j];
    if (label < 0 || label >= classes) {
      throw ValidationError("SoftmaxCrossEntropy: label out of range");
    }
    const double max = logits.col(j).maxCoeff();
    const Eigen::VectorXd e = (logits.col(j).array() - max).exp();
    const double sum = e.sum();
    total += std::log(sum) + max - logits(label, j);
    if (grad != nullptr) {
      grad->col(j) = e / (sum * n);
      (*grad)(label, j) -= 1.0 / n;
    }
  }
  return total / n;
}

}  // namespace dadp
