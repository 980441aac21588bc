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

#ifndef DADP_ENCODER_ENCODER_H_
#define DADP_ENCODER_ENCODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dadp/dyncore/dataset.h"
#include "dadp/encoder/context.h"
#include "dadp/nnmath/checkpoint.h"
#include "dadp/nnmath/mlp.h"

namespace dadp {

struct EncoderOptions {
  int history = 16;
  std::vector<int> encoder_hidden{64, 64};
  std::vector<int> head_hidden{64, 64};
  double beta_forward = 1.0;
  double beta_inverse = 1.0;
  int epochs = 10;
  int batch_size = 128;
  double learning_rate = 3e-4;
  // Anneals the learning rate to zero along a half cosine over all steps.
  bool cosine_decay = false;
  double train_ratio = 0.8;
};

struct EncoderDims {
  std::vector<int> encoder;
  std::vector<int> forward_head;
  std::vector<int> inverse_head;  // empty without actions
};

// z has dim(obs) + dim(act) entries. The forward head maps
// (s, a, z) to the standardized increment s' - s; the inverse head maps
// (s, s', z) to the standardized action.
EncoderDims MakeEncoderDims(int obs_dim, int act_dim,
                            const EncoderOptions& options);

// Context encoder plus the two dynamics heads and the standardization
// statistics they were trained with.
struct EncoderBundle {
  Mlp encoder;
  Mlp forward_head;
  Mlp inverse_head;
  TokenScaler scaler;
  int history = 16;
  int obs_dim = 1;
  int act_dim = 1;
  LagRule lag;

  int token_dim() const { return obs_dim + act_dim; }
  int z_dim() const { return encoder.output_dim(); }
  bool has_inverse() const { return act_dim > 0; }

  Eigen::VectorXd Encode(const ContextWindow& context) const;
  // contexts is (H * token_dim) x N.
  Eigen::MatrixXd EncodeBatch(const Eigen::MatrixXd& contexts) const;
  void RoundToFloat();

  bool operator==(const EncoderBundle&) const = default;
};

Checkpoint EncoderToCheckpoint(const EncoderBundle& bundle);
// Throws LineageError when the module tag is not an encoder.
EncoderBundle EncoderFromCheckpoint(const Checkpoint& ckpt);

// Standardized training tensors for a set of pairs; one pair per column.
struct EncoderBatch {
  Eigen::MatrixXd context;
  Eigen::MatrixXd state;
  Eigen::MatrixXd action;
  Eigen::MatrixXd next_state;
  Eigen::MatrixXd delta;  // standardized s' - s
};

EncoderBatch AssembleEncoderBatch(const Dataset& dataset,
                                  std::span<const ContextPair> pairs,
                                  std::span<const int> indices,
                                  const EncoderBundle& bundle);

struct EncoderLoss {
  double forward = 0.0;
  double inverse = 0.0;
  double total = 0.0;
};

struct EncoderGradients {
  MlpGradients encoder;
  MlpGradients forward_head;
  MlpGradients inverse_head;
};

// beta_f * mse(forward) + beta_i * mse(inverse). The inverse term is absent
// without actions. Gradients flow from both heads into the encoder.
EncoderLoss EncoderBatchLoss(const EncoderBundle& bundle,
                             const EncoderBatch& batch, double beta_forward,
                             double beta_inverse,
                             EncoderGradients* grads = nullptr);

struct EncoderEpoch {
  int epoch = 0;
  EncoderLoss train;
  EncoderLoss validation;
};

struct EncoderTrainResult {
  EncoderBundle bundle;
  std::vector<EncoderEpoch> curve;
  TrajectorySplit split;
};

// Joint training of encoder and heads on lagged pairs from the training
// split (by trajectory). The domain parameters are never read. Throws
// NumericError with the epoch and batch when the loss becomes non-finite.
EncoderTrainResult TrainEncoder(const Dataset& dataset, const LagRule& lag,
                                const EncoderOptions& options, uint64_t seed);

struct ForwardError {
  double standardized = 0.0;  // increment units / training std
  double raw = 0.0;           // observation units
};

// Forward-head prediction error of s_{t+1} over the given pairs.
ForwardError EvaluateForward(const EncoderBundle& bundle,
                             const Dataset& dataset,
                             std::span<const ContextPair> pairs);

}  // namespace dadp

#endif  // DADP_ENCODER_ENCODER_H_
