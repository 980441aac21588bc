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

#ifndef DADP_MIXDIFF_POLICY_H_
#define DADP_MIXDIFF_POLICY_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dadp/dyncore/dataset.h"
#include "dadp/encoder/encoder.h"
#include "dadp/mixdiff/denoiser.h"
#include "dadp/nnmath/checkpoint.h"

namespace dadp {

struct PolicyTrainOptions {
  int iterations = 20000;
  int batch_size = 128;
  double learning_rate = 3e-4;
  bool cosine_decay = false;
  std::vector<int> hidden{128, 128};
  // Loss curve resolution: mean batch loss over each block of this size.
  int log_every = 100;
};

// Standardized training windows and the frozen-encoder z of each.
struct PolicyWindows {
  Eigen::MatrixXd x0;  // window size x N
  Eigen::MatrixXd z;   // token_dim x N
};

// Window whose current row is step t: rows t - H .. t + F - 1, with rows
// before the episode start set to zero. Requires t + F <= L.
void FillWindow(const Dataset& dataset, const EpisodeRef& ref, int t,
                const WindowLayout& layout, const TokenScaler& scaler,
                Eigen::Ref<Eigen::VectorXd> out);

// Every t in [0, L - F] of every listed episode. z is encoded from the
// window's own H history rows, padded the same way as at rollout time.
PolicyWindows BuildPolicyWindows(const Dataset& dataset,
                                 std::span<const EpisodeRef> episodes,
                                 const EncoderBundle& encoder,
                                 const WindowLayout& layout);

// Mean squared error over the unmasked entries of the batch. The gradient
// is exactly zero on masked entries.
double MaskedMse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
                 const Eigen::VectorXd& mask, Eigen::MatrixXd* grad = nullptr);

// Training target for the variant: composite for Full, sigma eps otherwise.
Eigen::MatrixXd VariantTarget(const PolicyConfig& config,
                              const Eigen::MatrixXd& z_tiled,
                              const Eigen::MatrixXd& eps,
                              const Eigen::RowVectorXd& alpha,
                              const Eigen::RowVectorXd& sigma,
                              const Eigen::VectorXd& mask);

struct PolicyTrainResult {
  Denoiser denoiser;
  std::vector<std::pair<int, double>> loss_curve;  // (last iteration, mean)
};

// Trains the denoiser on every episode of `dataset` with the encoder frozen.
// Throws NumericError when the loss becomes non-finite.
PolicyTrainResult TrainPolicy(const Dataset& dataset,
                              const EncoderBundle& encoder,
                              const PolicyConfig& config,
                              const PolicyTrainOptions& options,
                              uint64_t seed);

// Deterministic DDIM sampling over InferenceGrid(config.steps). `known`
// holds the history and current observation (other entries are ignored),
// z is token_dim x N and `eps` is the initial noise. The chain starts at
// prior_lambda Z + eps and re-imposes the masked entries after every step.
Eigen::MatrixXd SampleWindows(const NoisePredictor& predictor,
                              const WindowLayout& layout,
                              const PolicyConfig& config,
                              const Eigen::MatrixXd& known,
                              const Eigen::MatrixXd& z,
                              const Eigen::MatrixXd& eps);

// Standardized action entries of the current row.
Eigen::VectorXd ExtractAction(const Eigen::VectorXd& window,
                              const WindowLayout& layout);

Checkpoint PolicyToCheckpoint(const Denoiser& denoiser,
                              uint64_t encoder_hash);
// Throws LineageError when the module tag is not a policy.
Denoiser PolicyFromCheckpoint(const Checkpoint& ckpt);

}  // namespace dadp

#endif  // DADP_MIXDIFF_POLICY_H_
