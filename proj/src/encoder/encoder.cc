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

#include "dadp/encoder/encoder.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "dadp/errors.h"
#include "dadp/nnmath/adam.h"
#include "dadp/nnmath/loss.h"
#include "dadp/nnmath/rng.h"

namespace dadp {
namespace {

constexpr char kEncoderTag[] = "encoder";

std::vector<int> Chain(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

void PutStandardizer(Checkpoint& ckpt, const std::string& name,
                     const Standardizer& s) {
  ckpt.arrays[name + ".mean"] = s.mean;
  ckpt.arrays[name + ".scale"] = s.scale;
}

Standardizer GetStandardizer(const Checkpoint& ckpt, const std::string& name) {
  return {ckpt.array(name + ".mean"), ckpt.array(name + ".scale")};
}

std::vector<int> Shuffled(int n, Rng& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(i + 1)]);
  }
  return order;
}

// Concatenates blocks row-wise: [a; b; c].
Eigen::MatrixXd Stack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      const Eigen::MatrixXd& c) {
  Eigen::MatrixXd out(a.rows() + b.rows() + c.rows(), a.cols());
  out << a, b, c;
  return out;
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

EncoderDims MakeEncoderDims(int obs_dim, int act_dim,
                            const EncoderOptions& options) {
  if (options.history < 1) throw ValidationError("history must be positive");
  const int tok = obs_dim + act_dim;
  const int z = tok;
  EncoderDims dims;
  dims.encoder = Chain(options.history * tok, options.encoder_hidden, z);
  dims.forward_head = Chain(tok + z, options.head_hidden, obs_dim);
  if (act_dim > 0) {
    dims.inverse_head = Chain(2 * obs_dim + z, options.head_hidden, act_dim);
  }
  return dims;
}

Eigen::VectorXd EncoderBundle::Encode(const ContextWindow& context) const {
  return encoder.Forward(context.features).col(0);
}

Eigen::MatrixXd EncoderBundle::EncodeBatch(
    const Eigen::MatrixXd& contexts) const {
  return encoder.Forward(contexts);
}

void EncoderBundle::RoundToFloat() {
  encoder.RoundToFloat();
  forward_head.RoundToFloat();
  if (has_inverse()) inverse_head.RoundToFloat();
}

Checkpoint EncoderToCheckpoint(const EncoderBundle& bundle) {
  Checkpoint ckpt;
  ckpt.module_tag = kEncoderTag;
  ckpt.networks.emplace_back("encoder", bundle.encoder);
  ckpt.networks.emplace_back("forward_head", bundle.forward_head);
  if (bundle.has_inverse()) {
    ckpt.networks.emplace_back("inverse_head", bundle.inverse_head);
  }
  ckpt.metadata["history"] = std::to_string(bundle.history);
  ckpt.metadata["obs_dim"] = std::to_string(bundle.obs_dim);
  ckpt.metadata["act_dim"] = std::to_string(bundle.act_dim);
  ckpt.metadata["lag"] = bundle.lag.ToString();
  PutStandardizer(ckpt, "obs", bundle.scaler.obs);
  PutStandardizer(ckpt, "act", bundle.scaler.act);
  PutStandardizer(ckpt, "delta", bundle.scaler.delta);
  return ckpt;
}

EncoderBundle EncoderFromCheckpoint(const Checkpoint& ckpt) {
  if (ckpt.module_tag != kEncoderTag) {
    throw LineageError("expected an encoder checkpoint, found '" +
                       ckpt.module_tag + "'");
  }
  EncoderBundle b;
  b.history = std::stoi(ckpt.meta("history"));
  b.obs_dim = std::stoi(ckpt.meta("obs_dim"));
  b.act_dim = std::stoi(ckpt.meta("act_dim"));
  b.lag = LagRule::Parse(ckpt.meta("lag"));
  b.encoder = ckpt.network("encoder");
  b.forward_head = ckpt.network("forward_head");
  if (b.has_inverse()) b.inverse_head = ckpt.network("inverse_head");
  b.scaler = {GetStandardizer(ckpt, "obs"), GetStandardizer(ckpt, "act"),
              GetStandardizer(ckpt, "delta")};
  if (b.encoder.input_dim() != b.history * b.token_dim()) {
    throw ValidationError("encoder input does not match history and token");
  }
  return b;
}

EncoderBatch AssembleEncoderBatch(const Dataset& dataset,
                                  std::span<const ContextPair> pairs,
                                  std::span<const int> indices,
                                  const EncoderBundle& bundle) {
  const int n = static_cast<int>(indices.size());
  const int od = dataset.obs_dim, ad = dataset.act_dim;
  const TokenScaler& sc = bundle.scaler;
  EncoderBatch b;
  b.context.resize(bundle.history * dataset.token_dim(), n);
  b.state.resize(od, n);
  b.action.resize(ad, n);
  b.next_state.resize(od, n);
  b.delta.resize(od, n);
  for (int c = 0; c < n; ++c) {
    const ContextPair& p = pairs[indices[c]];
    FillContextFeatures(dataset, p.context, p.context_end, bundle.history, sc,
                        b.context.col(c));
    const auto& ep = dataset.domains[p.target.domain].episodes[p.target.episode];
    for (int i = 0; i < od; ++i) {
      const double s = ep.obs(p.t, i), s1 = ep.obs(p.t + 1, i);
      b.state(i, c) = sc.obs.Apply(s, i);
      b.next_state(i, c) = sc.obs.Apply(s1, i);
      b.delta(i, c) = sc.delta.Apply(s1 - s, i);
    }
    for (int i = 0; i < ad; ++i) b.action(i, c) = sc.act.Apply(ep.action(p.t, i), i);
  }
  return b;
}

EncoderLoss EncoderBatchLoss(const EncoderBundle& bundle,
                             const EncoderBatch& batch, double beta_forward,
                             double beta_inverse, EncoderGradients* grads) {
  const bool want = grads != nullptr;
  MlpTape enc_tape, fwd_tape, inv_tape;
  const Eigen::MatrixXd z =
      bundle.encoder.Forward(batch.context, want ? &enc_tape : nullptr);
  const int zd = static_cast<int>(z.rows());

  EncoderLoss loss;
  Eigen::MatrixXd fwd_in = Stack(batch.state, batch.action, z);
  Eigen::MatrixXd fwd_out =
      bundle.forward_head.Forward(fwd_in, want ? &fwd_tape : nullptr);
  Eigen::MatrixXd d_fwd;
  loss.forward = Mse(fwd_out, batch.delta, want ? &d_fwd : nullptr);
  loss.total = beta_forward * loss.forward;

  Eigen::MatrixXd d_inv;
  if (bundle.has_inverse()) {
    Eigen::MatrixXd inv_in = Stack(batch.state, batch.next_state, z);
    Eigen::MatrixXd inv_out =
        bundle.inverse_head.Forward(inv_in, want ? &inv_tape : nullptr);
    loss.inverse = Mse(inv_out, batch.action, want ? &d_inv : nullptr);
    loss.total += beta_inverse * loss.inverse;
  }
  if (!want) return loss;

  grads->forward_head =
      bundle.forward_head.Backward(fwd_tape, beta_forward * d_fwd);
  Eigen::MatrixXd dz = grads->forward_head.input.bottomRows(zd);
  if (bundle.has_inverse()) {
    grads->inverse_head =
        bundle.inverse_head.Backward(inv_tape, beta_inverse * d_inv);
    dz += grads->inverse_head.input.bottomRows(zd);
  } else {
    grads->inverse_head = MlpGradients{};
  }
  grads->encoder = bundle.encoder.Backward(enc_tape, dz);
  return loss;
}

ForwardError EvaluateForward(const EncoderBundle& bundle,
                             const Dataset& dataset,
                             std::span<const ContextPair> pairs) {
  ForwardError err;
  if (pairs.empty()) return err;
  constexpr int kChunk = 4096;
  const int n = static_cast<int>(pairs.size());
  double sum_std = 0.0, sum_raw = 0.0;
  for (int start = 0; start < n; start += kChunk) {
    const int m = std::min(kChunk, n - start);
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), start);
    const EncoderBatch b = AssembleEncoderBatch(dataset, pairs, idx, bundle);
    const Eigen::MatrixXd z = bundle.encoder.Forward(b.context);
    const Eigen::MatrixXd pred =
        bundle.forward_head.Forward(Stack(b.state, b.action, z));
    for (int c = 0; c < m; ++c) {
      for (int i = 0; i < bundle.obs_dim; ++i) {
        const double e = pred(i, c) - b.delta(i, c);
        const double s = bundle.scaler.delta.scale[i];
        sum_std += e * e;
        sum_raw += e * e * s * s;
      }
    }
  }
  const double count = static_cast<double>(n) * bundle.obs_dim;
  err.standardized = sum_std / count;
  err.raw = sum_raw / count;
  return err;
}

EncoderTrainResult TrainEncoder(const Dataset& dataset, const LagRule& lag,
                                const EncoderOptions& options, uint64_t seed) {
  // Zero epochs is allowed and yields the untrained initialization.
  if (options.epochs < 0 || options.batch_size < 1) {
    throw ValidationError(
        "encoder epochs must be non-negative and batch size positive");
  }
  if (!(options.learning_rate > 0.0)) {
    throw ValidationError("encoder learning rate must be positive");
  }
  EncoderTrainResult result;
  result.split = SplitByTrajectory(dataset, options.train_ratio,
                                   DeriveSeed(seed, 1), lag.infinite ? 2 : 1);
  const auto& train_eps = result.split.train;
  const auto& val_eps = result.split.validation;

  EncoderBundle& b = result.bundle;
  b.history = options.history;
  b.obs_dim = dataset.obs_dim;
  b.act_dim = dataset.act_dim;
  b.lag = lag;
  b.scaler = TokenScaler::Fit(dataset, train_eps);
  const EncoderDims dims = MakeEncoderDims(b.obs_dim, b.act_dim, options);
  Rng init(DeriveSeed(seed, 2));
  b.encoder = Mlp::Glorot(dims.encoder, init);
  b.forward_head = Mlp::Glorot(dims.forward_head, init);
  if (b.has_inverse()) b.inverse_head = Mlp::Glorot(dims.inverse_head, init);

  auto params = [&b]() {
    std::vector<TensorView> p = b.encoder.Parameters("encoder");
    for (auto& v : b.forward_head.Parameters("forward_head")) p.push_back(v);
    if (b.has_inverse()) {
      for (auto& v : b.inverse_head.Parameters("inverse_head")) p.push_back(v);
    }
    return p;
  };
  AdamOptions adam_opts;
  adam_opts.learning_rate = options.learning_rate;
  Adam adam(adam_opts, params());

  const std::vector<ContextPair> val_pairs =
      BuildPairs(dataset, val_eps, lag, b.history, DeriveSeed(seed, 3));
  std::vector<int> val_idx(val_pairs.size());
  std::iota(val_idx.begin(), val_idx.end(), 0);

  std::vector<ContextPair> pairs;
  if (!lag.infinite) {
    pairs = BuildPairs(dataset, train_eps, lag, b.history, DeriveSeed(seed, 4));
  }
  const double lr0 = options.learning_rate;
  int64_t step = 0, total_steps = -1;

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    if (lag.infinite) {
      // Fresh cross-episode pairing every epoch.
      pairs = BuildPairs(dataset, train_eps, lag, b.history,
                         DeriveSeed(seed, 5, epoch));
    }
    const int n = static_cast<int>(pairs.size());
    const int batches = (n + options.batch_size - 1) / options.batch_size;
    if (total_steps < 0) total_steps = static_cast<int64_t>(batches) * options.epochs;
    Rng order_rng(DeriveSeed(seed, 6, epoch));
    const std::vector<int> order = Shuffled(n, order_rng);

    EncoderEpoch rec;
    rec.epoch = epoch;
    for (int bi = 0; bi < batches; ++bi) {
      const int start = bi * options.batch_size;
      const int m = std::min(options.batch_size, n - start);
      const std::span<const int> idx(order.data() + start, m);
      const EncoderBatch batch = AssembleEncoderBatch(dataset, pairs, idx, b);
      EncoderGradients g;
      const EncoderLoss loss = EncoderBatchLoss(
          b, batch, options.beta_forward, options.beta_inverse, &g);
      if (!std::isfinite(loss.total)) {
        throw NumericError("non-finite encoder loss at epoch " +
                           std::to_string(epoch) + " batch " +
                           std::to_string(bi) + " (forward " +
                           Fmt(loss.forward) + ", inverse " +
                           Fmt(loss.inverse) + ")");
      }
      if (options.cosine_decay) {
        const double frac = static_cast<double>(step) / total_steps;
        adam.set_learning_rate(0.5 * lr0 * (1.0 + std::cos(std::numbers::pi * frac)));
      }
      std::vector<ConstTensorView> gv = g.encoder.Views("encoder");
      for (auto& v : g.forward_head.Views("forward_head")) gv.push_back(v);
      if (b.has_inverse()) {
        for (auto& v : g.inverse_head.Views("inverse_head")) gv.push_back(v);
      }
      adam.Step(params(), gv);
      ++step;
      rec.train.forward += loss.forward / batches;
      rec.train.inverse += loss.inverse / batches;
      rec.train.total += loss.total / batches;
    }
    const EncoderBatch vb = AssembleEncoderBatch(dataset, val_pairs, val_idx, b);
    rec.validation = EncoderBatchLoss(b, vb, options.beta_forward,
                                      options.beta_inverse);
    result.curve.push_back(rec);
  }
  b.RoundToFloat();
  return result;
}

}  // namespace dadp
