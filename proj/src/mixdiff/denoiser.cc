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

#include "dadp/mixdiff/denoiser.h"

#include <cmath>
#include <string>

#include "dadp/errors.h"
#include "dadp/mixdiff/schedule.h"

namespace dadp {

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kNull: return "null";
    case Variant::kCond: return "cond";
    case Variant::kMixedNoPredict: return "mixed_no_predict";
    case Variant::kFull: return "full";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view name) {
  for (Variant v : {Variant::kNull, Variant::kCond, Variant::kMixedNoPredict,
                    Variant::kFull}) {
    if (VariantName(v) == name) return v;
  }
  throw ValidationError("unknown policy variant '" + std::string(name) + "'");
}

double PolicyConfig::prior_lambda() const {
  return variant == Variant::kMixedNoPredict || variant == Variant::kFull
             ? lambda
             : 0.0;
}

void PolicyConfig::Validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("guidance scale must be finite and non-negative");
  }
  if (steps < 1) throw ValidationError("inference steps must be at least 1");
  if (future < 1) throw ValidationError("prediction horizon must be positive");
}

Eigen::MatrixXd TimeEmbedding(const Eigen::RowVectorXd& k) {
  constexpr int kHalf = kTimeEmbeddingDim / 2;
  Eigen::MatrixXd out(kTimeEmbeddingDim, k.size());
  for (Eigen::Index c = 0; c < k.size(); ++c) {
    const double t = 1000.0 * k[c];
    for (int i = 0; i < kHalf; ++i) {
      const double freq = std::pow(1000.0, -static_cast<double>(i) / kHalf);
      out(i, c) = std::sin(t * freq);
      out(i + kHalf, c) = std::cos(t * freq);
    }
  }
  return out;
}

Denoiser::Denoiser(Mlp net, WindowLayout layout, PolicyConfig config)
    : net_(std::move(net)), layout_(layout), config_(config),
      mask_(MakeMask(layout)) {
  config_.Validate();
  if (net_.input_dim() != Dims(layout_, config_, {}).front() ||
      net_.output_dim() != layout_.size()) {
    throw ValidationError("denoiser network does not match the window");
  }
}

std::vector<int> Denoiser::Dims(const WindowLayout& layout,
                                const PolicyConfig& config,
                                const std::vector<int>& hidden) {
  const int in = layout.size() + kTimeEmbeddingDim +
                 (config.z_as_input() ? layout.token_dim() : 0);
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(layout.size());
  return dims;
}

Eigen::MatrixXd Denoiser::Input(const Eigen::MatrixXd& x_k,
                                const Eigen::RowVectorXd& k,
                                const Eigen::MatrixXd& z) const {
  const Eigen::Index n = x_k.cols();
  if (x_k.rows() != layout_.size() || k.size() != n) {
    throw ValidationError("denoiser input has the wrong shape");
  }
  const int zd = config_.z_as_input() ? layout_.token_dim() : 0;
  if (zd > 0 && (z.rows() != zd || z.cols() != n)) {
    throw ValidationError("denoiser z has the wrong shape");
  }
  Eigen::MatrixXd in(net_.input_dim(), n);
  in.topRows(layout_.size()) = x_k;
  in.middleRows(layout_.size(), kTimeEmbeddingDim) = TimeEmbedding(k);
  if (zd > 0) in.bottomRows(zd) = z;
  return in;
}

Eigen::MatrixXd Denoiser::Raw(const Eigen::MatrixXd& x_k,
                              const Eigen::RowVectorXd& k,
                              const Eigen::MatrixXd& z, MlpTape* tape) const {
  const Eigen::MatrixXd f = net_.Forward(Input(x_k, k, z), tape);
  Eigen::MatrixXd out(x_k.rows(), x_k.cols());
  for (Eigen::Index c = 0; c < x_k.cols(); ++c) {
    out.col(c) = x_k.col(c) - ScheduleAlpha(k[c]) * f.col(c);
  }
  if (config_.variant == Variant::kMixedNoPredict && config_.lambda != 0.0) {
    const Eigen::MatrixXd z_tiled = BroadcastZBatch(z, layout_, mask_);
    for (Eigen::Index c = 0; c < x_k.cols(); ++c) {
      out.col(c) -= (1.0 - ScheduleAlpha(k[c])) * config_.lambda * z_tiled.col(c);
    }
  }
  return out;
}

Eigen::MatrixXd Denoiser::NetworkGradient(const Eigen::MatrixXd& d_raw,
                                          const Eigen::RowVectorXd& k) {
  Eigen::MatrixXd g(d_raw.rows(), d_raw.cols());
  for (Eigen::Index c = 0; c < d_raw.cols(); ++c) {
    g.col(c) = -ScheduleAlpha(k[c]) * d_raw.col(c);
  }
  return g;
}

Eigen::MatrixXd Denoiser::Predict(const Eigen::MatrixXd& x_k, double k,
                                  const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd out =
      Raw(x_k, Eigen::RowVectorXd::Constant(x_k.cols(), k), z);
  if (config_.variant == Variant::kMixedNoPredict && config_.lambda != 0.0) {
    out += (1.0 - ScheduleAlpha(k)) * config_.lambda *
           BroadcastZBatch(z, layout_, mask_);
  }
  return out;
}

}  // namespace dadp
