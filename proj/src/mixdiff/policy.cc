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

#include "dadp/mixdiff/policy.h"

#include <cmath>
#include <numbers>
#include <string>

#include "dadp/errors.h"
#include "dadp/mixdiff/diffusion.h"
#include "dadp/mixdiff/schedule.h"
#include "dadp/nnmath/adam.h"
#include "dadp/nnmath/hash.h"
#include "dadp/nnmath/rng.h"

namespace dadp {
namespace {

constexpr char kPolicyTag[] = "policy";

}  // namespace

void FillWindow(const Dataset& dataset, const EpisodeRef& ref, int t,
                const WindowLayout& layout, const TokenScaler& scaler,
                Eigen::Ref<Eigen::VectorXd> out) {
  const auto& ep = dataset.domains[ref.domain].episodes[ref.episode];
  if (t < 0 || t + layout.future > ep.length) {
    throw ValidationError("window runs past the episode end");
  }
  const int od = layout.obs_dim;
  for (int r = 0; r < layout.rows(); ++r) {
    const int step = t - layout.history + r;
    for (int i = 0; i < layout.token_dim(); ++i) {
      double v = 0.0;
      if (step >= 0) {
        v = i < od ? scaler.obs.Apply(ep.obs(step, i), i)
                   : scaler.act.Apply(ep.action(step, i - od), i - od);
      }
      out[layout.index(r, i)] = v;
    }
  }
}

PolicyWindows BuildPolicyWindows(const Dataset& dataset,
                                 std::span<const EpisodeRef> episodes,
                                 const EncoderBundle& encoder,
                                 const WindowLayout& layout) {
  if (encoder.history != layout.history ||
      encoder.token_dim() != layout.token_dim()) {
    throw ValidationError("encoder and window disagree on history or token");
  }
  int n = 0;
  for (const auto& ref : episodes) {
    n += dataset.domains[ref.domain].episodes[ref.episode].length -
         layout.future + 1;
  }
  PolicyWindows w;
  w.x0.resize(layout.size(), n);
  Eigen::MatrixXd ctx(layout.history * layout.token_dim(), n);
  int c = 0;
  for (const auto& ref : episodes) {
    const int len = dataset.domains[ref.domain].episodes[ref.episode].length;
    for (int t = 0; t + layout.future <= len; ++t, ++c) {
      FillWindow(dataset, ref, t, layout, encoder.scaler, w.x0.col(c));
      ctx.col(c) = w.x0.col(c).head(ctx.rows());
    }
  }
  w.z = encoder.EncodeBatch(ctx);
  return w;
}

double MaskedMse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
                 const Eigen::VectorXd& mask, Eigen::MatrixXd* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols() ||
      pred.rows() != mask.size()) {
    throw ValidationError("masked mse operands have mismatched shapes");
  }
  const double free = static_cast<double>((mask.array() == 0.0).count());
  const double count = free * static_cast<double>(pred.cols());
  if (count == 0.0) throw ValidationError("mask leaves no entries to fit");
  const Eigen::VectorXd keep = (1.0 - mask.array()).matrix();
  const Eigen::MatrixXd diff =
      (pred - target).array().colwise() * keep.array();
  if (grad != nullptr) *grad = (2.0 / count) * diff;
  return diff.squaredNorm() / count;
}

Eigen::MatrixXd VariantTarget(const PolicyConfig& config,
                              const Eigen::MatrixXd& z_tiled,
                              const Eigen::MatrixXd& eps,
                              const Eigen::RowVectorXd& alpha,
                              const Eigen::RowVectorXd& sigma,
                              const Eigen::VectorXd& mask) {
  const double lambda =
      config.variant == Variant::kFull ? config.lambda : 0.0;
  return CompositeTarget(z_tiled, eps, alpha, sigma, lambda, mask);
}

PolicyTrainResult TrainPolicy(const Dataset& dataset,
                              const EncoderBundle& encoder,
                              const PolicyConfig& config,
                              const PolicyTrainOptions& options,
                              uint64_t seed) {
  config.Validate();
  if (dataset.act_dim < 1) {
    throw ValidationError("policy training needs an environment with actions");
  }
  if (options.iterations < 1 || options.batch_size < 1 ||
      options.log_every < 1 || !(options.learning_rate > 0.0)) {
    throw ValidationError("invalid policy training options");
  }
  const WindowLayout layout{encoder.history, config.future, dataset.obs_dim,
                            dataset.act_dim};
  const std::vector<EpisodeRef> episodes = AllEpisodes(dataset);
  const PolicyWindows data =
      BuildPolicyWindows(dataset, episodes, encoder, layout);
  const int n = static_cast<int>(data.x0.cols());

  Rng init(DeriveSeed(seed, 1));
  PolicyTrainResult result;
  Denoiser& den = result.denoiser;
  den = Denoiser(Mlp::Glorot(Denoiser::Dims(layout, config, options.hidden),
                             init),
                 layout, config);
  const Eigen::VectorXd& mask = den.mask();
  AdamOptions ao;
  ao.learning_rate = options.learning_rate;
  Adam adam(ao, den.net().Parameters("denoiser"));

  Rng rng(DeriveSeed(seed, 2));
  const int b = options.batch_size;
  const int tok = layout.token_dim();
  Eigen::MatrixXd x0(layout.size(), b), z(tok, b), eps(layout.size(), b);
  Eigen::RowVectorXd k(b), alpha(b), sigma(b);
  double block = 0.0;
  for (int it = 1; it <= options.iterations; ++it) {
    for (int c = 0; c < b; ++c) {
      const int j = static_cast<int>(rng.UniformInt(n));
      x0.col(c) = data.x0.col(j);
      z.col(c) = data.z.col(j);
      k[c] = rng.Uniform();
      alpha[c] = ScheduleAlpha(k[c]);
      sigma[c] = ScheduleSigma(k[c]);
    }
    for (int c = 0; c < b; ++c) {
      for (int i = 0; i < layout.size(); ++i) eps(i, c) = rng.Normal();
    }
    const Eigen::MatrixXd z_tiled = BroadcastZBatch(z, layout, mask);
    const Eigen::MatrixXd x_k = ForwardPerturb(x0, z_tiled, eps, alpha, sigma,
                                               config.prior_lambda(), mask);
    const Eigen::MatrixXd target =
        VariantTarget(config, z_tiled, eps, alpha, sigma, mask);
    MlpTape tape;
    const Eigen::MatrixXd pred = den.Raw(x_k, k, z, &tape);
    Eigen::MatrixXd grad;
    const double loss = MaskedMse(pred, target, mask, &grad);
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite policy loss at iteration " +
                         std::to_string(it));
    }
    if (options.cosine_decay) {
      const double frac = static_cast<double>(it - 1) / options.iterations;
      adam.set_learning_rate(0.5 * options.learning_rate *
                             (1.0 + std::cos(std::numbers::pi * frac)));
    }
    const MlpGradients g =
        den.net().Backward(tape, Denoiser::NetworkGradient(grad, k));
    adam.Step(den.net().Parameters("denoiser"), g.Views("denoiser"));
    block += loss;
    if (it % options.log_every == 0 || it == options.iterations) {
      const int len = it % options.log_every == 0 ? options.log_every
                                                  : it % options.log_every;
      result.loss_curve.emplace_back(it, block / len);
      block = 0.0;
    }
  }
  den.net().RoundToFloat();
  return result;
}

Eigen::MatrixXd SampleWindows(const NoisePredictor& predictor,
                              const WindowLayout& layout,
                              const PolicyConfig& config,
                              const Eigen::MatrixXd& known,
                              const Eigen::MatrixXd& z,
                              const Eigen::MatrixXd& eps) {
  config.Validate();
  const Eigen::VectorXd mask = MakeMask(layout);
  if (known.rows() != layout.size() || eps.rows() != layout.size() ||
      eps.cols() != known.cols()) {
    throw ValidationError("sampling buffers do not match the window");
  }
  const std::vector<double> grid = InferenceGrid(config.steps);
  const double lambda = config.prior_lambda();
  Eigen::MatrixXd x(known.rows(), known.cols());
  if (lambda != 0.0) {
    const Eigen::MatrixXd z_tiled = BroadcastZBatch(z, layout, mask);
    x = lambda * z_tiled + eps;
  } else {
    x = eps;
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (mask[i] != 0.0) x.row(i) = known.row(i);
  }
  for (size_t s = 0; s + 1 < grid.size(); ++s) {
    const Eigen::MatrixXd eps_hat = predictor.Predict(x, grid[s], z);
    x = DdimStep(x, eps_hat, ScheduleAlpha(grid[s]), ScheduleSigma(grid[s]),
                 ScheduleAlpha(grid[s + 1]), ScheduleSigma(grid[s + 1]), known,
                 mask);
  }
  return x;
}

Eigen::VectorXd ExtractAction(const Eigen::VectorXd& window,
                              const WindowLayout& layout) {
  return window.segment(layout.index(layout.current_row(), layout.obs_dim),
                        layout.act_dim);
}

Checkpoint PolicyToCheckpoint(const Denoiser& denoiser, uint64_t encoder_hash) {
  Checkpoint ckpt;
  ckpt.module_tag = kPolicyTag;
  ckpt.networks.emplace_back("denoiser", denoiser.net());
  const WindowLayout& l = denoiser.layout();
  const PolicyConfig& c = denoiser.config();
  ckpt.metadata["history"] = std::to_string(l.history);
  ckpt.metadata["future"] = std::to_string(l.future);
  ckpt.metadata["obs_dim"] = std::to_string(l.obs_dim);
  ckpt.metadata["act_dim"] = std::to_string(l.act_dim);
  ckpt.metadata["variant"] = std::string(VariantName(c.variant));
  ckpt.metadata["steps"] = std::to_string(c.steps);
  ckpt.metadata["encoder_hash"] = HashToHex(encoder_hash);
  // Exact round trip of lambda.
  ckpt.arrays["lambda"] = {c.lambda};
  return ckpt;
}

Denoiser PolicyFromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.module_tag != kPolicyTag) {
    throw LineageError("expected a policy checkpoint, found '" +
                       ckpt.module_tag + "'");
  }
  WindowLayout l;
  l.history = std::stoi(ckpt.meta("history"));
  l.future = std::stoi(ckpt.meta("future"));
  l.obs_dim = std::stoi(ckpt.meta("obs_dim"));
  l.act_dim = std::stoi(ckpt.meta("act_dim"));
  PolicyConfig c;
  c.variant = ParseVariant(ckpt.meta("variant"));
  c.steps = std::stoi(ckpt.meta("steps"));
  c.future = l.future;
  const auto& lam = ckpt.array("lambda");
  if (lam.size() != 1) throw ValidationError("policy checkpoint lambda");
  c.lambda = lam[0];
  return Denoiser(ckpt.network("denoiser"), l, c);
}

}  // namespace dadp
