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

#ifndef DADP_ENCODER_PROBE_H_
#define DADP_ENCODER_PROBE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dadp/dyncore/dataset.h"
#include "dadp/encoder/encoder.h"

namespace dadp {

// Embeddings of full context windows (no padding), one row per window.
struct EmbeddingSet {
  Eigen::MatrixXd z;       // N x z_dim
  Eigen::MatrixXd params;  // N x param_dim, domain parameters
  std::vector<int> domain;
  std::vector<int> episode;
  std::vector<int> end_step;

  int size() const { return static_cast<int>(domain.size()); }
};

// Windows end at H - 1, H - 1 + stride, ... up to L - 1 in each episode.
EmbeddingSet EmbedEpisodes(const EncoderBundle& bundle, const Dataset& dataset,
                           std::span<const EpisodeRef> episodes,
                           int stride = 1);

// Columns: domain_index, episode_index, end_step, z_0 .. z_{d-1}.
std::string EmbeddingsToCsv(const EmbeddingSet& set);

struct ProbeOptions {
  double train_ratio = 0.8;
  int classifier_steps = 1500;
  double classifier_lr = 0.05;
  int regressor_steps = 3000;
  int regressor_batch = 256;
  double regressor_lr = 3e-3;
  std::vector<int> regressor_hidden{32, 32};
};

// Held-out accuracy of a single softmax linear layer trained with full-batch
// Adam on standardized embeddings. Labels may be any integers. Throws
// ValidationError for fewer than two classes, non-finite embeddings or a
// size mismatch.
double LinearProbe(const Eigen::MatrixXd& embeddings,
                   std::span<const int> labels, uint64_t seed,
                   const ProbeOptions& options = {});

// Held-out MSE of a two-hidden-layer regressor from standardized embeddings
// to standardized targets (N x p). Same preconditions as LinearProbe; the
// labels only identify the classes.
double ReconstructParams(const Eigen::MatrixXd& embeddings,
                         const Eigen::MatrixXd& targets,
                         std::span<const int> labels, uint64_t seed,
                         const ProbeOptions& options = {});

struct EmbeddingStats {
  double intra = 0.0;  // mean squared distance to own-domain centroid
  double inter = 0.0;  // mean squared distance between distinct centroids
  double ratio = 0.0;  // intra / inter; infinity when inter is zero
  bool degenerate = false;
};

// Throws ValidationError for a single domain.
EmbeddingStats ComputeEmbeddingStats(const Eigen::MatrixXd& embeddings,
                                     std::span<const int> labels);

// Shapes of the probe networks, for gradient checks.
std::vector<int> LinearProbeDims(int z_dim, int classes);
std::vector<int> ReconstructionDims(int z_dim, int param_dim,
                                    const ProbeOptions& options = {});

}  // namespace dadp

#endif  // DADP_ENCODER_PROBE_H_
