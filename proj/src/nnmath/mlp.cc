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

#include "dadp/nnmath/mlp.h"

#include <cmath>
#include <string>
#include <utility>

#include "dadp/errors.h"

namespace dadp {

Mlp::Mlp(std::vector<int> layer_dims) : layer_dims_(std::move(layer_dims)) {
  if (layer_dims_.size() < 2) {
    throw ValidationError("Mlp needs at least an input and an output dim");
  }
  for (int d : layer_dims_) {
    if (d < 0) throw ValidationError("Mlp layer dims must be non-negative");
  }
  for (size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    weights_.push_back(
        Eigen::MatrixXd::Zero(layer_dims_[l + 1], layer_dims_[l]));
    biases_.push_back(Eigen::VectorXd::Zero(layer_dims_[l + 1]));
  }
}

Mlp Mlp::Glorot(std::vector<int> layer_dims, Rng& rng) {
  Mlp net(std::move(layer_dims));
  for (auto& w : net.weights_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // Row-major fill order so the stream does not depend on storage layout.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.Uniform(-limit, limit);
      }
    }
  }
  return net;
}

Eigen::Index Mlp::ParameterCount() const {
  Eigen::Index n = 0;
  for (int l = 0; l < num_layers(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& x, MlpTape* tape) const {
  if (weights_.empty()) throw ValidationError("Mlp has no layers");
  if (x.rows() != input_dim()) {
    throw ValidationError("Mlp input has " + std::to_string(x.rows()) +
                          " rows, expected " + std::to_string(input_dim()));
  }
  if (tape != nullptr) {
    tape->activations.clear();
    tape->activations.push_back(x);
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd next = weights_[l] * h;
    next.colwise() += biases_[l];
    if (l + 1 < num_layers()) next = next.array().tanh().matrix();
    h = std::move(next);
    if (tape != nullptr) tape->activations.push_back(h);
  }
  return h;
}

MlpGradients Mlp::Backward(const MlpTape& tape,
                           const Eigen::MatrixXd& output_grad) const {
  if (tape.empty()) {
    throw ValidationError("Mlp::Backward called without a recorded forward");
  }
  if (static_cast<int>(tape.activations.size()) != num_layers() + 1 ||
      tape.activations.back().rows() != output_grad.rows() ||
      tape.activations.back().cols() != output_grad.cols()) {
    throw ValidationError("Mlp::Backward gradient does not match the tape");
  }
  MlpGradients grads;
  grads.weights.resize(num_layers());
  grads.biases.resize(num_layers());
  Eigen::MatrixXd delta = output_grad;  // d loss / d pre-activation
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (l + 1 < num_layers()) {
      const Eigen::MatrixXd& a = tape.activations[l + 1];
      delta = (delta.array() * (1.0 - a.array().square())).matrix();
    }
    grads.weights[l] = delta * tape.activations[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    delta = weights_[l].transpose() * delta;
  }
  grads.input = std::move(delta);
  return grads;
}

std::vector<TensorView> Mlp::Parameters(const std::string& prefix) {
  std::vector<TensorView> views;
  for (int l = 0; l < num_layers(); ++l) {
    views.push_back({prefix + ".W" + std::to_string(l), weights_[l].data(),
                     weights_[l].size()});
    views.push_back({prefix + ".b" + std::to_string(l), biases_[l].data(),
                     biases_[l].size()});
  }
  return views;
}

std::vector<ConstTensorView> MlpGradients::Views(
    const std::string& prefix) const {
  std::vector<ConstTensorView> views;
  for (size_t l = 0; l < weights.size(); ++l) {
    views.push_back({prefix + ".W" + std::to_string(l), weights[l].data(),
                     weights[l].size()});
    views.push_back({prefix + ".b" + std::to_string(l), biases[l].data(),
                     biases[l].size()});
  }
  return views;
}

bool Mlp::AllFinite() const {
  for (int l = 0; l < num_layers(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

void Mlp::RoundToFloat() {
  auto round = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  for (int l = 0; l < num_layers(); ++l) {
    weights_[l] = weights_[l].unaryExpr(round);
    biases_[l] = biases_[l].unaryExpr(round);
  }
}

bool Mlp::operator==(const Mlp& other) const {
  if (layer_dims_ != other.layer_dims_) return false;
  for (int l = 0; l < num_layers(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) {
      return false;
    }
  }
  return true;
}

}  // namespace dadp
