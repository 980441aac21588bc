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

#ifndef DADP_MIXDIFF_DENOISER_H_
#define DADP_MIXDIFF_DENOISER_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dadp/mixdiff/window.h"
#include "dadp/nnmath/mlp.h"

namespace dadp {

// Ablation variants. Null: plain diffusion without z. Cond: z appended to
// the denoiser input, unbiased prior. MixedNoPredict: prior shifted by
// lambda z, network trained on sigma eps with the shift added back
// analytically when sampling. Full: shifted prior and composite target.
enum class Variant { kNull, kCond, kMixedNoPredict, kFull };

std::string_view VariantName(Variant v);
// "null", "cond", "mixed_no_predict" or "full".
Variant ParseVariant(std::string_view name);

struct PolicyConfig {
  double lambda = 0.1;
  int steps = 5;
  Variant variant = Variant::kFull;
  int future = 4;

  // lambda as seen by the forward process and the sampling prior.
  double prior_lambda() const;
  bool z_as_input() const { return variant == Variant::kCond; }
  bool uses_z() const { return variant != Variant::kNull; }
  void Validate() const;

  bool operator==(const PolicyConfig&) const = default;
};

inline constexpr int kTimeEmbeddingDim = 16;

// Sinusoidal embedding of 1000 k: sin of 8 geometric frequencies followed by
// the matching cosines. One column per entry of k.
Eigen::MatrixXd TimeEmbedding(const Eigen::RowVectorXd& k);

// Anything that maps (x_k, k, z) to the eps_hat consumed by DdimStep.
// x_k is window x N, z is token_dim x N.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  virtual Eigen::MatrixXd Predict(const Eigen::MatrixXd& x_k, double k,
                                  const Eigen::MatrixXd& z) const = 0;
};

class Denoiser : public NoisePredictor {
 public:
  Denoiser() = default;
  Denoiser(Mlp net, WindowLayout layout, PolicyConfig config);

  static std::vector<int> Dims(const WindowLayout& layout,
                               const PolicyConfig& config,
                               const std::vector<int>& hidden);

  // Network input: [x_k; time embedding; z if Cond].
  Eigen::MatrixXd Input(const Eigen::MatrixXd& x_k, const Eigen::RowVectorXd& k,
                        const Eigen::MatrixXd& z) const;
  // The quantity the training loss is applied to. The network f estimates
  // the clean window and enters through a skip connection,
  //   raw = x_k - alpha(k) f - s,
  // with s = (1 - alpha) lambda Z for MixedNoPredict and 0 otherwise, so
  // the error of x0 = (x_k - eps_hat) / alpha is not amplified by 1 / alpha
  // near k = 1.
  Eigen::MatrixXd Raw(const Eigen::MatrixXd& x_k, const Eigen::RowVectorXd& k,
                      const Eigen::MatrixXd& z, MlpTape* tape = nullptr) const;
  // d(loss)/d(network output) from d(loss)/d(raw).
  static Eigen::MatrixXd NetworkGradient(const Eigen::MatrixXd& d_raw,
                                         const Eigen::RowVectorXd& k);
  // Raw output, plus (1 - alpha) lambda Z for MixedNoPredict.
  Eigen::MatrixXd Predict(const Eigen::MatrixXd& x_k, double k,
                          const Eigen::MatrixXd& z) const override;

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const WindowLayout& layout() const { return layout_; }
  const PolicyConfig& config() const { return config_; }
  PolicyConfig& config() { return config_; }
  const Eigen::VectorXd& mask() const { return mask_; }

  bool operator==(const Denoiser& o) const {
    return net_ == o.net_ && config_ == o.config_ && layout_ == o.layout_;
  }

 private:
  Mlp net_;
  WindowLayout layout_;
  PolicyConfig config_;
  Eigen::VectorXd mask_;
};

}  // namespace dadp

#endif  // DADP_MIXDIFF_DENOISER_H_
