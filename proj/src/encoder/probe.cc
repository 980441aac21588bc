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

#include "dadp/encoder/probe.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "dadp/errors.h"
#include "dadp/nnmath/adam.h"
#include "dadp/nnmath/loss.h"
#include "dadp/nnmath/mlp.h"
#include "dadp/nnmath/rng.h"

namespace dadp {
namespace {

// Maps arbitrary labels to 0..K-1 in ascending label order.
std::vector<int> CompactLabels(std::span<const int> labels, int* classes) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  *classes = next;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids[l]);
  return out;
}

void CheckProbeInput(const Eigen::MatrixXd& embeddings,
                     std::span<const int> labels, int* classes) {
  if (embeddings.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw ValidationError("embedding and label counts differ");
  }
  if (!embeddings.allFinite()) {
    throw ValidationError("embeddings contain non-finite values");
  }
  CompactLabels(labels, classes);
  if (*classes < 2) {
    throw ValidationError("probing needs at least two domains");
  }
}

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

Split RandomSplit(int n, double ratio, uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(i + 1)]);
  }
  int n_train = static_cast<int>(std::lround(ratio * n));
  n_train = std::clamp(n_train, 1, n - 1);
  return {{order.begin(), order.begin() + n_train},
          {order.begin() + n_train, order.end()}};
}

// Column-major (dim x count) copy of the selected rows, standardized with
// statistics of `fit_rows`.
struct Standardized {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Standardized(const Eigen::MatrixXd& x, const std::vector<int>& fit_rows) {
    const int d = static_cast<int>(x.cols());
    mean = Eigen::VectorXd::Zero(d);
    scale = Eigen::VectorXd::Ones(d);
    for (int r : fit_rows) mean += x.row(r).transpose();
    mean /= static_cast<double>(fit_rows.size());
    Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
    for (int r : fit_rows) {
      var += (x.row(r).transpose() - mean).cwiseAbs2();
    }
    var /= static_cast<double>(fit_rows.size());
    for (int i = 0; i < d; ++i) {
      if (var[i] > 1e-24) scale[i] = std::sqrt(var[i]);
    }
  }

  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x,
                        const std::vector<int>& rows) const {
    Eigen::MatrixXd out(x.cols(), rows.size());
    for (size_t c = 0; c < rows.size(); ++c) {
      out.col(c) = (x.row(rows[c]).transpose() - mean).cwiseQuotient(scale);
    }
    return out;
  }
};

}  // namespace

EmbeddingSet EmbedEpisodes(const EncoderBundle& bundle, const Dataset& dataset,
                           std::span<const EpisodeRef> episodes, int stride) {
  if (stride < 1) throw ValidationError("embedding stride must be positive");
  EmbeddingSet set;
  std::vector<Eigen::VectorXd> contexts;
  std::vector<const std::vector<double>*> params;
  for (const auto& ref : episodes) {
    const int len = dataset.domains[ref.domain].episodes[ref.episode].length;
    for (int end = bundle.history - 1; end < len; end += stride) {
      contexts.push_back(ExtractContext(dataset, ref, end, bundle.history,
                                        bundle.scaler)
                             .features);
      set.domain.push_back(ref.domain);
      set.episode.push_back(ref.episode);
      set.end_step.push_back(end);
      params.push_back(&dataset.domains[ref.domain].params);
    }
  }
  const int n = set.size();
  Eigen::MatrixXd ctx(bundle.history * bundle.token_dim(), n);
  for (int i = 0; i < n; ++i) ctx.col(i) = contexts[i];
  set.z = n > 0 ? Eigen::MatrixXd(bundle.EncodeBatch(ctx).transpose())
                : Eigen::MatrixXd(0, bundle.z_dim());
  set.params.resize(n, dataset.param_dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dataset.param_dim; ++j) set.params(i, j) = (*params[i])[j];
  }
  return set;
}

std::string EmbeddingsToCsv(const EmbeddingSet& set) {
  std::string out = "domain_index,episode_index,end_step";
  for (int j = 0; j < set.z.cols(); ++j) out += ",z_" + std::to_string(j);
  out += '\n';
  char buf[64];
  for (int i = 0; i < set.size(); ++i) {
    out += std::to_string(set.domain[i]) + ',' + std::to_string(set.episode[i]) +
           ',' + std::to_string(set.end_step[i]);
    for (int j = 0; j < set.z.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.9g", set.z(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<int> LinearProbeDims(int z_dim, int classes) {
  return {z_dim, classes};
}

std::vector<int> ReconstructionDims(int z_dim, int param_dim,
                                    const ProbeOptions& options) {
  std::vector<int> dims{z_dim};
  dims.insert(dims.end(), options.regressor_hidden.begin(),
              options.regressor_hidden.end());
  dims.push_back(param_dim);
  return dims;
}

double LinearProbe(const Eigen::MatrixXd& embeddings,
                   std::span<const int> labels, uint64_t seed,
                   const ProbeOptions& options) {
  int classes = 0;
  CheckProbeInput(embeddings, labels, &classes);
  const std::vector<int> y = CompactLabels(labels, &classes);
  const Split split = RandomSplit(static_cast<int>(y.size()),
                                  options.train_ratio, DeriveSeed(seed, 1));
  const Standardized stdz(embeddings, split.train);
  const Eigen::MatrixXd x_train = stdz.Apply(embeddings, split.train);
  const Eigen::MatrixXd x_test = stdz.Apply(embeddings, split.test);
  std::vector<int> y_train, y_test;
  for (int r : split.train) y_train.push_back(y[r]);
  for (int r : split.test) y_test.push_back(y[r]);

  Rng init(DeriveSeed(seed, 2));
  Mlp net = Mlp::Glorot(LinearProbeDims(static_cast<int>(embeddings.cols()),
                                        classes),
                        init);
  AdamOptions ao;
  ao.learning_rate = options.classifier_lr;
  Adam adam(ao, net.Parameters("probe"));
  for (int s = 0; s < options.classifier_steps; ++s) {
    MlpTape tape;
    const Eigen::MatrixXd logits = net.Forward(x_train, &tape);
    Eigen::MatrixXd grad;
    SoftmaxCrossEntropy(logits, y_train, &grad);
    const MlpGradients g = net.Backward(tape, grad);
    adam.Step(net.Parameters("probe"), g.Views("probe"));
  }
  const Eigen::MatrixXd logits = net.Forward(x_test);
  int correct = 0;
  for (int c = 0; c < logits.cols(); ++c) {
    Eigen::Index best = 0;
    logits.col(c).maxCoeff(&best);
    if (best == y_test[c]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y_test.size());
}

double ReconstructParams(const Eigen::MatrixXd& embeddings,
                         const Eigen::MatrixXd& targets,
                         std::span<const int> labels, uint64_t seed,
                         const ProbeOptions& options) {
  int classes = 0;
  CheckProbeInput(embeddings, labels, &classes);
  if (targets.rows() != embeddings.rows()) {
    throw ValidationError("target and embedding counts differ");
  }
  const Split split = RandomSplit(static_cast<int>(labels.size()),
                                  options.train_ratio, DeriveSeed(seed, 1));
  const Standardized sx(embeddings, split.train);
  const Standardized sy(targets, split.train);
  const Eigen::MatrixXd x_train = sx.Apply(embeddings, split.train);
  const Eigen::MatrixXd y_train = sy.Apply(targets, split.train);

  Rng rng(DeriveSeed(seed, 2));
  Mlp net = Mlp::Glorot(ReconstructionDims(static_cast<int>(embeddings.cols()),
                                           static_cast<int>(targets.cols()),
                                           options),
                        rng);
  AdamOptions ao;
  ao.learning_rate = options.regressor_lr;
  Adam adam(ao, net.Parameters("regressor"));
  const int n = static_cast<int>(x_train.cols());
  const int batch = std::min(options.regressor_batch, n);
  Eigen::MatrixXd xb(x_train.rows(), batch), yb(y_train.rows(), batch);
  for (int s = 0; s < options.regressor_steps; ++s) {
    for (int c = 0; c < batch; ++c) {
      const int r = static_cast<int>(rng.UniformInt(n));
      xb.col(c) = x_train.col(r);
      yb.col(c) = y_train.col(r);
    }
    MlpTape tape;
    const Eigen::MatrixXd pred = net.Forward(xb, &tape);
    Eigen::MatrixXd grad;
    Mse(pred, yb, &grad);
    const MlpGradients g = net.Backward(tape, grad);
    adam.Step(net.Parameters("regressor"), g.Views("regressor"));
  }
  return Mse(net.Forward(sx.Apply(embeddings, split.test)),
             sy.Apply(targets, split.test));
}

EmbeddingStats ComputeEmbeddingStats(const Eigen::MatrixXd& embeddings,
                                     std::span<const int> labels) {
  int classes = 0;
  CheckProbeInput(embeddings, labels, &classes);
  const std::vector<int> y = CompactLabels(labels, &classes);
  const int d = static_cast<int>(embeddings.cols());
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(classes, d);
  std::vector<int> counts(classes, 0);
  for (size_t i = 0; i < y.size(); ++i) {
    centroids.row(y[i]) += embeddings.row(i);
    ++counts[y[i]];
  }
  for (int k = 0; k < classes; ++k) centroids.row(k) /= counts[k];

  EmbeddingStats stats;
  for (size_t i = 0; i < y.size(); ++i) {
    stats.intra += (embeddings.row(i) - centroids.row(y[i])).squaredNorm();
  }
  stats.intra /= static_cast<double>(y.size());
  int pairs = 0;
  for (int a = 0; a < classes; ++a) {
    for (int b = a + 1; b < classes; ++b) {
      stats.inter += (centroids.row(a) - centroids.row(b)).squaredNorm();
      ++pairs;
    }
  }
  stats.inter /= pairs;
  if (stats.inter > 0.0) {
    stats.ratio = stats.intra / stats.inter;
  } else {
    stats.ratio = std::numeric_limits<double>::infinity();
    stats.degenerate = true;
  }
  return stats;
}

}  // namespace dadp
