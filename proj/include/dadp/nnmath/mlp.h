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

#ifndef DADP_NNMATH_MLP_H_
#define DADP_NNMATH_MLP_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dadp/nnmath/rng.h"
#include "dadp/nnmath/tensor.h"

namespace dadp {

// Activations recorded by Mlp::Forward. activations[0] is the input batch,
// activations[l + 1] the output of layer l (after tanh on hidden layers).
struct MlpTape {
  std::vector<Eigen::MatrixXd> activations;
  bool empty() const { return activations.empty(); }
};

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd input;

  std::vector<ConstTensorView> Views(const std::string& prefix) const;
};

// Fully connected network: tanh on every hidden layer, identity on the
// output layer. Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  // All parameters zero.
  explicit Mlp(std::vector<int> layer_dims);

  // Uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static Mlp Glorot(std::vector<int> layer_dims, Rng& rng);

  const std::vector<int>& layer_dims() const { return layer_dims_; }
  int input_dim() const { return layer_dims_.front(); }
  int output_dim() const { return layer_dims_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  Eigen::Index ParameterCount() const;

  // x is input_dim x batch. Throws ValidationError on a dimension mismatch.
  // When `tape` is given the activations needed by Backward are stored.
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x,
                          MlpTape* tape = nullptr) const;

  // Reverse-mode pass for d(loss)/d(output) = output_grad. Throws
  // ValidationError if the tape is empty or does not match the batch.
  MlpGradients Backward(const MlpTape& tape,
                        const Eigen::MatrixXd& output_grad) const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  // Views in declaration order: W0, b0, W1, b1, ...
  std::vector<TensorView> Parameters(const std::string& prefix);

  bool AllFinite() const;

  // Rounds every parameter to the nearest float, so an in-memory network
  // equals the one read back from a checkpoint.
  void RoundToFloat();

  bool operator==(const Mlp& other) const;

 private:
  std::vector<int> layer_dims_;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace dadp

#endif  // DADP_NNMATH_MLP_H_
