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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dadp/dyncore/dataset.h"
#include "dadp/dyncore/envs.h"
#include "dadp/encoder/context.h"
#include "dadp/encoder/encoder.h"
#include "dadp/encoder/probe.h"
#include "dadp/errors.h"
#include "dadp/nnmath/rng.h"

namespace dadp {
namespace {

Dataset BallDrop(int episodes, int len, uint64_t seed = 1) {
  EnvConfig cfg;
  cfg.balldrop.episode_len = len;
  return GenerateDataset(TrainingGrid(EnvId::kBallDrop, 10, cfg), episodes,
                         len, seed, cfg, 3);
}

Dataset Push(int domains, int episodes, uint64_t seed = 1) {
  EnvConfig cfg;
  return GenerateDataset(TrainingGrid(EnvId::kPush1D, domains, cfg), episodes,
                         64, seed, cfg, 20);
}

EncoderOptions SmallOptions() {
  EncoderOptions o;
  o.history = 8;
  o.encoder_hidden = {16};
  o.head_hidden = {16};
  o.epochs = 10;
  o.batch_size = 64;
  o.learning_rate = 3e-3;
  return o;
}

TEST(PairsTest, FiniteLagCountsAdmissibleSteps) {
  const Dataset ds = BallDrop(2, 32);
  const std::vector<EpisodeRef> one{{0, 0}};
  const auto pairs = BuildPairs(ds, one, LagRule::Finite(1), 16, 0);
  ASSERT_EQ(pairs.size(), 15u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.context, p.target);
    EXPECT_EQ(p.context_end, p.t - 1);
    EXPECT_GE(p.context_end, 15);
    EXPECT_LE(p.t, 30);
  }
}

TEST(PairsTest, LagTooLongIsRejected) {
  const Dataset ds = BallDrop(2, 32);
  EXPECT_THROW(BuildPairs(ds, AllEpisodes(ds), LagRule::Finite(32), 16, 0),
               ValidationError);
}

TEST(PairsTest, InfiniteLagNeverReusesTheTargetEpisode) {
  const Dataset ds = BallDrop(2, 32);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto pairs = BuildPairs(ds, AllEpisodes(ds), LagRule::Infinite(), 16,
                                  seed);
    EXPECT_EQ(pairs.size(), 10u * 2u * 31u);
    for (const auto& p : pairs) {
      EXPECT_EQ(p.context.domain, p.target.domain);
      EXPECT_NE(p.context.episode, p.target.episode);
      EXPECT_GE(p.context_end, 15);
      EXPECT_LE(p.context_end, 31);
      EXPECT_GE(p.t, 0);
      EXPECT_LE(p.t, 30);
    }
  }
}

TEST(PairsTest, InfiniteLagNeedsTwoEpisodes) {
  const Dataset ds = BallDrop(2, 32);
  const std::vector<EpisodeRef> lonely{{0, 0}, {1, 0}, {1, 1}};
  EXPECT_THROW(BuildPairs(ds, lonely, LagRule::Infinite(), 16, 0),
               ValidationError);
}

TEST(ContextTest, PaddingBeforeEpisodeStart) {
  const Dataset ds = Push(4, 2);
  const TokenScaler sc = TokenScaler::Fit(ds, AllEpisodes(ds));
  const Trajectory& ep = ds.domains[0].episodes[0];
  Eigen::VectorXd out(4 * 2);
  FillTrajectoryContext(ep, -1, 4, sc, out);
  EXPECT_EQ(out.squaredNorm(), 0.0);
  FillTrajectoryContext(ep, 0, 4, sc, out);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(out[i], 0.0);
  EXPECT_EQ(out[6], sc.obs.Apply(ep.obs(0), 0));
  EXPECT_EQ(out[7], sc.act.Apply(ep.action(0), 0));
  FillTrajectoryContext(ep, 10, 4, sc, out);
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ(out[2 * r], sc.obs.Apply(ep.obs(7 + r), 0));
  }
}

TEST(ContextTest, StandardizerStatistics) {
  const std::vector<double> v{1, 10, 3, 10, 5, 10};
  const Standardizer s = Standardizer::Fit(v, 2);
  EXPECT_DOUBLE_EQ(s.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(s.scale[0], std::sqrt(8.0 / 3.0));
  // A constant column keeps unit scale instead of dividing by zero.
  EXPECT_DOUBLE_EQ(s.mean[1], 10.0);
  EXPECT_DOUBLE_EQ(s.scale[1], 1.0);
  EXPECT_DOUBLE_EQ(s.Invert(s.Apply(4.2, 0), 0), 4.2);
}

TEST(EncoderTest, ZeroWeightsGiveOutputBias) {
  const Dataset ds = Push(4, 4);
  EncoderOptions o = SmallOptions();
  o.epochs = 0;
  EncoderBundle b = TrainEncoder(ds, LagRule::Infinite(), o, 0).bundle;
  for (auto& w : b.encoder.weights()) w.setZero();
  b.encoder.biases().back() << 0.5, -0.25;
  const auto ctx = ExtractContext(ds, {1, 2}, 20, b.history, b.scaler);
  const Eigen::VectorXd z = b.Encode(ctx);
  EXPECT_EQ(z[0], 0.5);
  EXPECT_EQ(z[1], -0.25);
}

TEST(EncoderTest, UntrainedEncoderIsAllowed) {
  const Dataset ds = Push(4, 4);
  EncoderOptions o = SmallOptions();
  o.epochs = 0;
  const EncoderTrainResult r = TrainEncoder(ds, LagRule::Infinite(), o, 0);
  EXPECT_TRUE(r.curve.empty());
  EXPECT_EQ(r.bundle.z_dim(), 2);
  EXPECT_TRUE(r.bundle.encoder.AllFinite());
}

TEST(EncoderTest, EncodeIsPure) {
  const Dataset ds = Push(4, 4);
  const EncoderBundle b =
      TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 3).bundle;
  const auto ctx = ExtractContext(ds, {2, 1}, 30, b.history, b.scaler);
  EXPECT_EQ(b.Encode(ctx), b.Encode(ctx));
}

TEST(EncoderTest, TrainingIsBitReproducible) {
  const Dataset ds = Push(4, 6);
  const auto a = TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 9);
  const auto b = TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 9);
  EXPECT_TRUE(a.bundle == b.bundle);
  const auto c = TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 10);
  EXPECT_FALSE(a.bundle == c.bundle);
}

TEST(EncoderTest, LossDecreasesOnBothEnvironments) {
  for (const Dataset& ds : {Push(4, 10), BallDrop(10, 32)}) {
    for (LagRule lag : {LagRule::Finite(1), LagRule::Infinite()}) {
      const auto r = TrainEncoder(ds, lag, SmallOptions(), 1);
      ASSERT_EQ(r.curve.size(), 10u);
      EXPECT_LT(r.curve.back().train.total, r.curve.front().train.total)
          << EnvName(ds.env) << " lag " << lag.ToString();
    }
  }
}

TEST(EncoderTest, BallDropHasNoInverseHead) {
  const auto r =
      TrainEncoder(BallDrop(4, 32), LagRule::Infinite(), SmallOptions(), 1);
  EXPECT_FALSE(r.bundle.has_inverse());
  EXPECT_EQ(r.bundle.z_dim(), 1);
  for (const auto& e : r.curve) EXPECT_EQ(e.train.inverse, 0.0);
}

TEST(EncoderTest, NeverReadsDomainParameters) {
  Dataset ds = Push(4, 6);
  const auto a = TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 4);
  for (auto& d : ds.domains) {
    for (double& p : d.params) p = -p * 7.0 + 1.0;
  }
  const auto b = TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 4);
  EXPECT_TRUE(a.bundle == b.bundle);
}

TEST(EncoderTest, CheckpointRoundTrip) {
  const auto r =
      TrainEncoder(Push(4, 4), LagRule::Finite(4), SmallOptions(), 2);
  const EncoderBundle back = EncoderFromCheckpoint(EncoderToCheckpoint(r.bundle));
  EXPECT_TRUE(back == r.bundle);
  Checkpoint wrong = EncoderToCheckpoint(r.bundle);
  wrong.module_tag = "policy";
  EXPECT_THROW(EncoderFromCheckpoint(wrong), LineageError);
}

TEST(EncoderTest, TimeReversalChangesEmbedding) {
  const Dataset ds = Push(4, 10);
  const EncoderBundle b =
      TrainEncoder(ds, LagRule::Infinite(), SmallOptions(), 5).bundle;
  Rng rng(1);
  double mean_shift = 0.0;
  const int n = 100, td = b.token_dim();
  for (int i = 0; i < n; ++i) {
    const EpisodeRef ref{static_cast<int>(rng.UniformInt(4)),
                         static_cast<int>(rng.UniformInt(10))};
    const int end = 20 + static_cast<int>(rng.UniformInt(40));
    ContextWindow ctx = ExtractContext(ds, ref, end, b.history, b.scaler);
    ContextWindow rev = ctx;
    for (int r = 0; r < b.history; ++r) {
      rev.features.segment(r * td, td) =
          ctx.features.segment((b.history - 1 - r) * td, td);
    }
    mean_shift += (b.Encode(ctx) - b.Encode(rev)).norm() / n;
  }
  EXPECT_GT(mean_shift, 1e-3);
}

TEST(EncoderTest, InfiniteLagGroupsContextsByDomain) {
  const Dataset ds = BallDrop(100, 32, 3);
  EncoderOptions o;
  o.history = 16;
  o.epochs = 20;
  o.learning_rate = 1e-3;
  o.cosine_decay = true;
  const auto r = TrainEncoder(ds, LagRule::Infinite(), o, 1);
  const EmbeddingSet emb =
      EmbedEpisodes(r.bundle, ds, r.split.validation, 8);
  // Mean distance between same-domain contexts of different episodes versus
  // the mean distance to the nearest context of another domain.
  double same = 0.0, cross = 0.0;
  long n_same = 0;
  for (int i = 0; i < emb.size(); ++i) {
    double nearest = 1e300;
    for (int j = 0; j < emb.size(); ++j) {
      const double d = (emb.z.row(i) - emb.z.row(j)).norm();
      if (emb.domain[i] == emb.domain[j]) {
        if (emb.episode[i] != emb.episode[j]) {
          same += d;
          ++n_same;
        }
      } else {
        nearest = std::min(nearest, d);
      }
    }
    cross += nearest / emb.size();
  }
  EXPECT_LT(same / n_same, cross);
}

TEST(ForwardErrorTest, UnitsAreConsistent) {
  const Dataset ds = BallDrop(6, 32);
  const auto r = TrainEncoder(ds, LagRule::Finite(1), SmallOptions(), 2);
  const auto pairs = BuildPairs(ds, r.split.validation, LagRule::Finite(1),
                                r.bundle.history, 0);
  const ForwardError e = EvaluateForward(r.bundle, ds, pairs);
  const double s = r.bundle.scaler.delta.scale[0];
  EXPECT_NEAR(e.raw, e.standardized * s * s, 1e-9 * (1.0 + e.raw));
}

TEST(EmbedTest, WindowPlacement) {
  const Dataset ds = Push(4, 4);
  EncoderOptions o = SmallOptions();
  o.epochs = 0;
  const EncoderBundle b = TrainEncoder(ds, LagRule::Infinite(), o, 0).bundle;
  const std::vector<EpisodeRef> refs{{0, 0}, {3, 1}};
  const EmbeddingSet e = EmbedEpisodes(b, ds, refs, 5);
  // Ends 7, 12, ..., 62 in each 64-step episode.
  ASSERT_EQ(e.size(), 2 * 12);
  EXPECT_EQ(e.end_step.front(), 7);
  EXPECT_EQ(e.end_step[11], 62);
  EXPECT_EQ(e.domain.back(), 3);
  EXPECT_EQ(e.params(13, 0), ds.domains[3].params[0]);
}

// Probe fixtures: `per` points for each of `k` classes.
std::vector<int> Labels(int k, int per) {
  std::vector<int> l;
  for (int c = 0; c < k; ++c) l.insert(l.end(), per, c);
  return l;
}

TEST(ProbeTest, OneHotIsSeparable) {
  const auto labels = Labels(5, 20);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(100, 5);
  for (int i = 0; i < 100; ++i) z(i, labels[i]) = 1.0;
  EXPECT_DOUBLE_EQ(LinearProbe(z, labels, 1), 1.0);
}

TEST(ProbeTest, NoiseIsAtChance) {
  const auto labels = Labels(10, 50);
  double mean = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 100);
    Eigen::MatrixXd z(500, 4);
    for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.Normal();
    mean += LinearProbe(z, labels, seed) / 5.0;
  }
  EXPECT_NEAR(mean, 0.1, 0.05);
}

TEST(ProbeTest, ShuffledLabelsDropToChance) {
  auto labels = Labels(10, 30);
  Rng rng(2);
  Eigen::MatrixXd z(300, 10);
  for (int i = 0; i < 300; ++i) {
    for (int j = 0; j < 10; ++j) z(i, j) = (j == labels[i]) + 0.1 * rng.Normal();
  }
  EXPECT_GT(LinearProbe(z, labels, 3), 0.95);
  for (int i = 299; i > 0; --i) {
    std::swap(labels[i], labels[rng.UniformInt(i + 1)]);
  }
  EXPECT_LT(LinearProbe(z, labels, 3), 0.3);
}

TEST(ProbeTest, RejectsSingleClass) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Random(20, 2);
  const std::vector<int> labels(20, 4);
  EXPECT_THROW(LinearProbe(z, labels, 0), ValidationError);
}

TEST(ReconstructionTest, IdentityIsLearnable) {
  const auto labels = Labels(10, 20);
  Eigen::MatrixXd xi(200, 2);
  for (int i = 0; i < 200; ++i) {
    xi(i, 0) = 0.5 + 0.2 * (labels[i] % 5);
    xi(i, 1) = 0.4 * (labels[i] / 5);
  }
  EXPECT_LT(ReconstructParams(xi, xi, labels, 1), 1e-3);
}

TEST(ReconstructionTest, ConstantEmbeddingsGiveTargetVariance) {
  const auto labels = Labels(10, 20);
  Eigen::MatrixXd xi(200, 1);
  for (int i = 0; i < 200; ++i) xi(i, 0) = labels[i];
  const Eigen::MatrixXd z = Eigen::MatrixXd::Constant(200, 3, 0.7);
  EXPECT_NEAR(ReconstructParams(z, xi, labels, 1), 1.0, 0.25);
}

TEST(StatsTest, CentroidsAndDegenerateCases) {
  const auto labels = Labels(3, 4);
  Eigen::MatrixXd z(12, 2);
  for (int i = 0; i < 12; ++i) z.row(i) << labels[i], 2.0 * labels[i];
  EmbeddingStats s = ComputeEmbeddingStats(z, labels);
  EXPECT_EQ(s.intra, 0.0);
  EXPECT_EQ(s.ratio, 0.0);
  EXPECT_GT(s.inter, 0.0);
  EXPECT_FALSE(s.degenerate);

  const Eigen::MatrixXd same = Eigen::MatrixXd::Random(12, 2);
  Eigen::MatrixXd shared(12, 2);
  for (int i = 0; i < 12; ++i) shared.row(i) = same.row(i % 4);
  s = ComputeEmbeddingStats(shared, labels);
  EXPECT_TRUE(std::isinf(s.ratio));
  EXPECT_TRUE(s.degenerate);

  EXPECT_THROW(ComputeEmbeddingStats(z, std::vector<int>(12, 0)),
               ValidationError);
}

}  // namespace
}  // namespace dadp
