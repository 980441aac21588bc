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

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dadp/dyncore/dataset.h"
#include "dadp/dyncore/envs.h"
#include "dadp/encoder/encoder.h"
#include "dadp/errors.h"
#include "dadp/mixdiff/denoiser.h"
#include "dadp/mixdiff/diffusion.h"
#include "dadp/mixdiff/policy.h"
#include "dadp/mixdiff/schedule.h"
#include "dadp/mixdiff/window.h"
#include "dadp/nnmath/checkpoint.h"
#include "dadp/nnmath/hash.h"
#include "dadp/nnmath/rng.h"

namespace dadp {
namespace {

Eigen::VectorXd Vec1(double v) { return Eigen::VectorXd::Constant(1, v); }
Eigen::RowVectorXd Row1(double v) { return Eigen::RowVectorXd::Constant(1, v); }
Eigen::MatrixXd Mat1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Eigen::MatrixXd RandomMatrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.Normal();
  }
  return m;
}

WindowLayout SmallLayout() { return WindowLayout{3, 2, 1, 1}; }

TEST(ScheduleTest, UnitCircleOnDenseGrid) {
  for (int i = 0; i <= 10000; ++i) {
    const double k = i / 10000.0;
    const double a = ScheduleAlpha(k), s = ScheduleSigma(k);
    EXPECT_NEAR(a * a + s * s, 1.0, 1e-12) << k;
  }
}

TEST(ScheduleTest, Monotone) {
  for (int i = 1; i <= 10000; ++i) {
    const double k0 = (i - 1) / 10000.0, k1 = i / 10000.0;
    EXPECT_LT(ScheduleAlpha(k1), ScheduleAlpha(k0));
    EXPECT_GT(ScheduleSigma(k1), ScheduleSigma(k0));
  }
}

TEST(ScheduleTest, FloorsAtEndpoints) {
  EXPECT_EQ(FlooredAlpha(1.0), kScheduleFloor);
  EXPECT_EQ(FlooredSigma(0.0), kScheduleFloor);
  EXPECT_EQ(FlooredAlpha(0.0), 1.0);
  EXPECT_GT(ScheduleAlpha(kMaxInferenceK), kScheduleFloor);
}

TEST(ScheduleTest, InferenceGridIsUniform) {
  const auto grid = InferenceGrid(5);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid.front(), 0.999);
  EXPECT_EQ(grid.back(), 0.0);
  for (size_t i = 1; i < grid.size(); ++i) {
    EXPECT_NEAR(grid[i - 1] - grid[i], 0.999 / 5, 1e-15);
  }
  EXPECT_EQ(InferenceGrid(1), (std::vector<double>{0.999, 0.0}));
  EXPECT_THROW(InferenceGrid(0), ValidationError);
}

TEST(WindowTest, MaskCoversHistoryAndCurrentObservation) {
  const WindowLayout l{2, 2, 2, 1};
  const Eigen::VectorXd m = MakeMask(l);
  ASSERT_EQ(m.size(), 12);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(m[i], 1.0);
  EXPECT_EQ(m[l.index(2, 0)], 1.0);
  EXPECT_EQ(m[l.index(2, 1)], 1.0);
  EXPECT_EQ(m[l.index(2, 2)], 0.0);
  for (int i = 9; i < 12; ++i) EXPECT_EQ(m[i], 0.0);
}

TEST(WindowTest, BroadcastZeroIsZero) {
  const WindowLayout l{2, 2, 1, 1};
  EXPECT_TRUE(BroadcastZ(Eigen::VectorXd::Zero(2), l, MakeMask(l)).isZero(0));
}

TEST(WindowTest, SingleUnmaskedRowIsOneCopy) {
  const WindowLayout l{0, 1, 1, 1};
  const Eigen::Vector2d z(0.3, -1.2);
  EXPECT_EQ(BroadcastZ(z, l, Eigen::VectorXd::Zero(2)), Eigen::VectorXd(z));
}

TEST(WindowTest, FullMaskGivesZero) {
  const WindowLayout l{2, 2, 1, 1};
  const Eigen::Vector2d z(0.3, -1.2);
  EXPECT_TRUE(BroadcastZ(z, l, Eigen::VectorXd::Ones(l.size())).isZero(0));
}

TEST(WindowTest, BroadcastTilesOnlyGeneratedEntries) {
  const WindowLayout l{1, 2, 1, 1};
  const Eigen::Vector2d z(2.0, 3.0);
  const Eigen::VectorXd t = BroadcastZ(z, l, MakeMask(l));
  EXPECT_EQ(t, (Eigen::VectorXd(6) << 0, 0, 0, 3, 2, 3).finished());
}

TEST(WindowTest, DimensionMismatchThrows) {
  const WindowLayout l{1, 2, 1, 1};
  EXPECT_THROW(BroadcastZ(Eigen::VectorXd::Zero(3), l, MakeMask(l)),
               ValidationError);
  EXPECT_THROW(MakeMask(WindowLayout{1, 0, 1, 1}), ValidationError);
}

TEST(DiffusionTest, ForwardScalarExample) {
  const Eigen::MatrixXd x = ForwardPerturb(Mat1(1.0), Mat1(0.5), Mat1(1.0),
                                           Row1(0.6), Row1(0.8), 1.0, Vec1(0));
  EXPECT_NEAR(x(0, 0), 1.6, 1e-15);
}

TEST(DiffusionTest, ForwardWithoutBiasIsStandard) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double x0 = rng.Normal(), e = rng.Normal(), k = rng.Uniform();
    const double lambda = rng.Uniform(0.0, 5.0);
    const Eigen::VectorXd x =
        ForwardPerturb(Vec1(x0), Vec1(0.0), Vec1(e), k, lambda, Vec1(0));
    EXPECT_EQ(x[0], ScheduleAlpha(k) * x0 + ScheduleSigma(k) * e);
  }
}

TEST(DiffusionTest, FullyNoisedIsBiasPlusNoise) {
  const double z = 0.7, e = -0.4, x0 = 2.0;
  for (double lambda : {0.1, 1.0}) {
    const Eigen::VectorXd x =
        ForwardPerturb(Vec1(x0), Vec1(z), Vec1(e), 1.0 - 1e-7, lambda, Vec1(0));
    EXPECT_NEAR(x[0], lambda * z + e, 1e-6);
  }
}

TEST(DiffusionTest, CompositeTargetExamples) {
  const Eigen::MatrixXd t = CompositeTarget(Mat1(0.5), Mat1(1.0), Row1(0.6),
                                            Row1(0.8), 1.0, Vec1(0));
  EXPECT_NEAR(t(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(0.6 * 1.0 + t(0, 0), 1.6, 1e-15);
  EXPECT_EQ(CompositeTarget(Vec1(0.5), Vec1(1.0), 0.0, 1.0, Vec1(0))[0], 0.0);
  const double k = 0.37;
  EXPECT_EQ(CompositeTarget(Vec1(0.5), Vec1(1.3), k, 0.0, Vec1(0))[0],
            ScheduleSigma(k) * 1.3);
}

TEST(DiffusionTest, ConsistencyIdentity) {
  const WindowLayout l{2, 3, 1, 1};
  const Eigen::VectorXd mask = MakeMask(l);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x0 = RandomMatrix(l.size(), 1, rng);
    const Eigen::VectorXd eps = RandomMatrix(l.size(), 1, rng);
    const Eigen::VectorXd z = BroadcastZ(RandomMatrix(2, 1, rng), l, mask);
    const double k = rng.Uniform(), lambda = rng.Uniform(0.0, 3.0);
    const Eigen::VectorXd xk = ForwardPerturb(x0, z, eps, k, lambda, mask);
    const Eigen::VectorXd t = CompositeTarget(z, eps, k, lambda, mask);
    for (int j = 0; j < l.size(); ++j) {
      if (mask[j] != 0.0) continue;
      EXPECT_NEAR(xk[j], ScheduleAlpha(k) * x0[j] + t[j], 1e-12);
    }
  }
}

TEST(DiffusionTest, FinalStepRecoversExample) {
  const Eigen::MatrixXd x = DdimStep(Mat1(1.6), Mat1(1.0), 0.6, 0.8, 1.0, 0.0,
                                     Mat1(0.0), Vec1(0));
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
}

TEST(DiffusionTest, IntermediateStepWithBiasIsNotForwardConsistent) {
  const Eigen::MatrixXd step = DdimStep(Mat1(1.6), Mat1(1.0), 0.6, 0.8, 0.8,
                                        0.6, Mat1(0.0), Vec1(0));
  EXPECT_NEAR(step(0, 0), 1.55, 1e-14);
  const Eigen::MatrixXd fwd = ForwardPerturb(Mat1(1.0), Mat1(0.5), Mat1(1.0),
                                             Row1(0.8), Row1(0.6), 1.0, Vec1(0));
  EXPECT_NEAR(fwd(0, 0), 1.5, 1e-14);
}

TEST(DiffusionTest, UnbiasedStepLandsOnForwardMarginal) {
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x0 = rng.Normal(), e = rng.Normal();
    const double k = rng.Uniform(0.01, kMaxInferenceK);
    const double k_prev = rng.Uniform(0.0, k);
    const Eigen::VectorXd xk =
        ForwardPerturb(Vec1(x0), Vec1(0.0), Vec1(e), k, 0.0, Vec1(0));
    const Eigen::VectorXd t = CompositeTarget(Vec1(0.0), Vec1(e), k, 0.0, Vec1(0));
    const Eigen::VectorXd step = DdimStep(xk, t, k, k_prev, Vec1(0.0), Vec1(0));
    const Eigen::VectorXd want =
        ForwardPerturb(Vec1(x0), Vec1(0.0), Vec1(e), k_prev, 0.0, Vec1(0));
    worst = std::max(worst, std::abs(step[0] - want[0]));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(DiffusionTest, FinalStepExactForAnyBias) {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = rng.Normal(), e = rng.Normal(), z = rng.Normal();
    const double k = rng.Uniform(0.0, kMaxInferenceK);
    if (k == 0.0) continue;
    const double lambda = rng.Uniform(0.0, 5.0);
    const Eigen::VectorXd xk =
        ForwardPerturb(Vec1(x0), Vec1(z), Vec1(e), k, lambda, Vec1(0));
    const Eigen::VectorXd t = CompositeTarget(Vec1(z), Vec1(e), k, lambda, Vec1(0));
    EXPECT_NEAR(DdimStep(xk, t, k, 0.0, Vec1(0.0), Vec1(0))[0], x0, 1e-9);
  }
}

TEST(DiffusionTest, MaskedEntriesAreFixedPoints) {
  const WindowLayout l{2, 2, 1, 1};
  const Eigen::VectorXd mask = MakeMask(l);
  Rng rng(17);
  const Eigen::VectorXd x0 = RandomMatrix(l.size(), 1, rng);
  const Eigen::VectorXd eps = RandomMatrix(l.size(), 1, rng);
  const Eigen::VectorXd z = RandomMatrix(l.size(), 1, rng);
  const Eigen::VectorXd xk = ForwardPerturb(x0, z, eps, 0.7, 2.0, mask);
  const Eigen::VectorXd step = DdimStep(xk, eps, 0.7, 0.3, x0, mask);
  for (int j = 0; j < l.size(); ++j) {
    if (mask[j] == 0.0) continue;
    EXPECT_EQ(xk[j], x0[j]);
    EXPECT_EQ(step[j], x0[j]);
  }
}

TEST(DiffusionTest, StepRequiresDecreasingK) {
  EXPECT_THROW(DdimStep(Vec1(0), Vec1(0), 0.3, 0.3, Vec1(0), Vec1(0)),
               ValidationError);
}

TEST(PolicyConfigTest, Validation) {
  PolicyConfig c;
  c.lambda = -0.1;
  EXPECT_THROW(c.Validate(), ValidationError);
  c.lambda = 0.1;
  c.steps = 0;
  EXPECT_THROW(c.Validate(), ValidationError);
  EXPECT_THROW(ParseVariant("bogus"), ValidationError);
  for (Variant v : {Variant::kNull, Variant::kCond, Variant::kMixedNoPredict,
                    Variant::kFull}) {
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  }
}

TEST(LossTest, MaskedGradientIsExactlyZero) {
  const WindowLayout l = SmallLayout();
  const Eigen::VectorXd mask = MakeMask(l);
  Rng rng(19);
  const Eigen::MatrixXd pred = RandomMatrix(l.size(), 7, rng);
  const Eigen::MatrixXd target = RandomMatrix(l.size(), 7, rng);
  Eigen::MatrixXd grad;
  EXPECT_GT(MaskedMse(pred, target, mask, &grad), 0.0);
  const Eigen::RowVectorXd k = Eigen::RowVectorXd::LinSpaced(7, 0.1, 0.9);
  const Eigen::MatrixXd net_grad = Denoiser::NetworkGradient(grad, k);
  for (int j = 0; j < l.size(); ++j) {
    if (mask[j] == 0.0) continue;
    for (int c = 0; c < 7; ++c) {
      EXPECT_EQ(grad(j, c), 0.0);
      EXPECT_EQ(net_grad(j, c), 0.0);
    }
  }
}

// A network that returns the clean window makes the skip-connection output
// equal the variant's regression target.
TEST(LossTest, OracleDenoiserHasZeroLoss) {
  const WindowLayout l = SmallLayout();
  const Eigen::VectorXd mask = MakeMask(l);
  Rng rng(23);
  const int n = 32;
  const Eigen::MatrixXd x0 = RandomMatrix(l.size(), n, rng);
  const Eigen::MatrixXd eps = RandomMatrix(l.size(), n, rng);
  const Eigen::MatrixXd z = BroadcastZBatch(RandomMatrix(2, n, rng), l, mask);
  Eigen::RowVectorXd alpha(n), sigma(n);
  for (int c = 0; c < n; ++c) {
    const double k = rng.Uniform();
    alpha[c] = ScheduleAlpha(k);
    sigma[c] = ScheduleSigma(k);
  }
  for (Variant v : {Variant::kFull, Variant::kMixedNoPredict}) {
    PolicyConfig cfg;
    cfg.variant = v;
    cfg.lambda = 0.8;
    const Eigen::MatrixXd xk =
        ForwardPerturb(x0, z, eps, alpha, sigma, cfg.prior_lambda(), mask);
    const Eigen::MatrixXd target =
        VariantTarget(cfg, z, eps, alpha, sigma, mask);
    Eigen::MatrixXd raw = xk - (x0.array().rowwise() * alpha.array()).matrix();
    if (v == Variant::kMixedNoPredict) {
      raw -= (z.array().rowwise() * (1.0 - alpha.array())).matrix() *
             cfg.lambda;
    }
    EXPECT_LT(MaskedMse(raw, target, mask), 1e-24);
  }
  EXPECT_EQ(MaskedMse(x0, x0, mask), 0.0);
}

class OraclePredictor : public NoisePredictor {
 public:
  explicit OraclePredictor(Eigen::MatrixXd x0) : x0_(std::move(x0)) {}
  Eigen::MatrixXd Predict(const Eigen::MatrixXd& x_k, double k,
                          const Eigen::MatrixXd&) const override {
    return x_k - ScheduleAlpha(k) * x0_;
  }

 private:
  Eigen::MatrixXd x0_;
};

TEST(SampleTest, OracleSingleStepReturnsCleanAction) {
  const WindowLayout l = SmallLayout();
  Rng rng(29);
  const Eigen::MatrixXd x0 = RandomMatrix(l.size(), 4, rng);
  const Eigen::MatrixXd eps = RandomMatrix(l.size(), 4, rng);
  const Eigen::MatrixXd z = RandomMatrix(2, 4, rng);
  PolicyConfig cfg;
  cfg.steps = 1;
  cfg.lambda = 1.0;
  cfg.future = l.future;
  const Eigen::MatrixXd out =
      SampleWindows(OraclePredictor(x0), l, cfg, x0, z, eps);
  for (int c = 0; c < 4; ++c) {
    const Eigen::VectorXd a = ExtractAction(out.col(c), l);
    EXPECT_NEAR(a[0], ExtractAction(x0.col(c), l)[0], 1e-9);
  }
}

Denoiser RandomDenoiser(const WindowLayout& l, const PolicyConfig& cfg,
                        uint64_t seed) {
  Rng rng(seed);
  return Denoiser(Mlp::Glorot(Denoiser::Dims(l, cfg, {16}), rng), l, cfg);
}

// Textbook deterministic DDIM on the noise prediction, with history
// re-imposed after every step.
Eigen::MatrixXd PlainDdim(const NoisePredictor& net, const WindowLayout& l,
                          int steps, const Eigen::MatrixXd& known,
                          const Eigen::MatrixXd& z, const Eigen::MatrixXd& eps) {
  const Eigen::VectorXd mask = MakeMask(l);
  auto impose = [&](Eigen::MatrixXd& x) {
    for (int i = 0; i < l.size(); ++i) {
      if (mask[i] != 0.0) x.row(i) = known.row(i);
    }
  };
  Eigen::MatrixXd x = eps;
  impose(x);
  const std::vector<double> grid = InferenceGrid(steps);
  for (int s = 0; s < steps; ++s) {
    const double k = grid[s], k_prev = grid[s + 1];
    const double a = std::cos(0.5 * std::numbers::pi * k);
    const double sg = std::sin(0.5 * std::numbers::pi * k);
    const double ap = std::cos(0.5 * std::numbers::pi * k_prev);
    const double sp = std::sin(0.5 * std::numbers::pi * k_prev);
    const Eigen::MatrixXd e = net.Predict(x, k, z);
    x = ((ap / a) * (x - e).array() + (sp / sg) * e.array()).matrix();
    impose(x);
  }
  return x;
}

TEST(SampleTest, UnbiasedSamplingMatchesPlainDdim) {
  const WindowLayout l = SmallLayout();
  Rng rng(31);
  const Eigen::MatrixXd known = RandomMatrix(l.size(), 3, rng);
  const Eigen::MatrixXd eps = RandomMatrix(l.size(), 3, rng);
  const Eigen::MatrixXd z = RandomMatrix(2, 3, rng);
  PolicyConfig null_cfg;
  null_cfg.variant = Variant::kNull;
  null_cfg.future = l.future;
  const Denoiser null_net = RandomDenoiser(l, null_cfg, 37);
  for (int steps : {1, 5, 10}) {
    null_cfg.steps = steps;
    Denoiser den(null_net.net(), l, null_cfg);
    const Eigen::MatrixXd ref = PlainDdim(den, l, steps, known, z, eps);
    const Eigen::MatrixXd out = SampleWindows(den, l, null_cfg, known, z, eps);
    EXPECT_EQ(out, ref) << steps;

    PolicyConfig full_cfg = null_cfg;
    full_cfg.variant = Variant::kFull;
    full_cfg.lambda = 0.0;
    Denoiser full(null_net.net(), l, full_cfg);
    EXPECT_EQ(SampleWindows(full, l, full_cfg, known, z, eps), ref) << steps;
  }
}

TEST(SampleTest, HistoryIsReturnedBitwise) {
  const WindowLayout l = SmallLayout();
  Rng rng(41);
  const Eigen::MatrixXd known = RandomMatrix(l.size(), 3, rng);
  const Eigen::MatrixXd eps = RandomMatrix(l.size(), 3, rng);
  const Eigen::MatrixXd z = RandomMatrix(2, 3, rng);
  PolicyConfig cfg;
  cfg.lambda = 2.0;
  cfg.future = l.future;
  const Denoiser den = RandomDenoiser(l, cfg, 43);
  const Eigen::MatrixXd out = SampleWindows(den, l, cfg, known, z, eps);
  const Eigen::VectorXd mask = MakeMask(l);
  for (int i = 0; i < l.size(); ++i) {
    if (mask[i] != 0.0) {
      EXPECT_EQ(out.row(i), known.row(i));
    }
  }
  EXPECT_EQ(out, SampleWindows(den, l, cfg, known, z, eps));
}

TEST(SampleTest, BufferMismatchThrows) {
  const WindowLayout l = SmallLayout();
  PolicyConfig cfg;
  cfg.future = l.future;
  const Denoiser den = RandomDenoiser(l, cfg, 1);
  EXPECT_THROW(SampleWindows(den, l, cfg, Eigen::MatrixXd::Zero(3, 1),
                             Eigen::MatrixXd::Zero(2, 1),
                             Eigen::MatrixXd::Zero(l.size(), 1)),
               ValidationError);
}

class PolicyTrainingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    EnvConfig cfg;
    dataset_ = new Dataset(GenerateDataset(
        TrainingGrid(EnvId::kPush1D, 4, cfg), 5, 32, 7, cfg, 20));
    EncoderOptions eo;
    eo.history = 4;
    eo.encoder_hidden = {8};
    eo.head_hidden = {8};
    eo.epochs = 0;
    encoder_ = new EncoderBundle(
        TrainEncoder(*dataset_, LagRule::Infinite(), eo, 3).bundle);
  }
  static void TearDownTestSuite() {
    delete dataset_;
    delete encoder_;
  }

  static PolicyTrainOptions Options() {
    PolicyTrainOptions o;
    o.iterations = 300;
    o.batch_size = 32;
    o.hidden = {32};
    o.learning_rate = 1e-3;
    return o;
  }

  static Dataset* dataset_;
  static EncoderBundle* encoder_;
};

Dataset* PolicyTrainingTest::dataset_ = nullptr;
EncoderBundle* PolicyTrainingTest::encoder_ = nullptr;

TEST_F(PolicyTrainingTest, WindowsCoverEveryStartWithZeroPadding) {
  const WindowLayout l{4, 4, dataset_->obs_dim, dataset_->act_dim};
  const auto eps = AllEpisodes(*dataset_);
  const PolicyWindows w = BuildPolicyWindows(*dataset_, eps, *encoder_, l);
  ASSERT_EQ(w.x0.cols(), 20 * (32 - 4 + 1));
  ASSERT_EQ(w.z.cols(), w.x0.cols());
  ASSERT_EQ(w.z.rows(), l.token_dim());
  EXPECT_TRUE(w.x0.col(0).head(l.history * l.token_dim()).isZero(0));
  EXPECT_FALSE(w.x0.col(0).tail(l.future * l.token_dim()).isZero(0));
  EXPECT_THROW(BuildPolicyWindows(*dataset_, eps, *encoder_,
                                  WindowLayout{5, 4, 1, 1}),
               ValidationError);
}

TEST_F(PolicyTrainingTest, TrainingIsDeterministic) {
  PolicyConfig cfg;
  const auto a = TrainPolicy(*dataset_, *encoder_, cfg, Options(), 5);
  const auto b = TrainPolicy(*dataset_, *encoder_, cfg, Options(), 5);
  EXPECT_TRUE(a.denoiser == b.denoiser);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  const auto c = TrainPolicy(*dataset_, *encoder_, cfg, Options(), 6);
  EXPECT_FALSE(a.denoiser == c.denoiser);
}

TEST_F(PolicyTrainingTest, EveryVariantTrainsAndLossFalls) {
  for (Variant v : {Variant::kNull, Variant::kCond, Variant::kMixedNoPredict,
                    Variant::kFull}) {
    PolicyConfig cfg;
    cfg.variant = v;
    const auto r = TrainPolicy(*dataset_, *encoder_, cfg, Options(), 9);
    ASSERT_EQ(r.loss_curve.size(), 3u);
    EXPECT_EQ(r.loss_curve.back().first, 300);
    EXPECT_LT(r.loss_curve.back().second, r.loss_curve.front().second)
        << VariantName(v);
    EXPECT_EQ(r.denoiser.config().variant, v);
  }
}

TEST_F(PolicyTrainingTest, CheckpointRoundTrip) {
  PolicyConfig cfg;
  cfg.variant = Variant::kCond;
  cfg.lambda = 0.37;
  cfg.steps = 7;
  const auto r = TrainPolicy(*dataset_, *encoder_, cfg, Options(), 5);
  const Checkpoint ckpt = PolicyToCheckpoint(r.denoiser, 0x1234);
  const Denoiser back = PolicyFromCheckpoint(ParseCheckpoint(
      SerializeCheckpoint(ckpt)));
  EXPECT_TRUE(back == r.denoiser);
  EXPECT_EQ(ckpt.meta("encoder_hash"), HashToHex(0x1234));
  EXPECT_THROW(PolicyFromCheckpoint(EncoderToCheckpoint(*encoder_)),
               LineageError);
}

TEST_F(PolicyTrainingTest, InvalidOptionsRejected) {
  PolicyTrainOptions o = Options();
  o.iterations = 0;
  EXPECT_THROW(TrainPolicy(*dataset_, *encoder_, PolicyConfig{}, o, 1),
               ValidationError);
}

TEST(PolicyTrainingSlowTest, FullVariantLossFallsTenfold) {
  EnvConfig env;
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kPush1D, 9, env), 20,
                                     64, 1, env, 20);
  EncoderOptions eo;
  eo.epochs = 2;
  const EncoderBundle enc =
      TrainEncoder(ds, LagRule::Infinite(), eo, 2).bundle;
  PolicyTrainOptions po;
  po.iterations = 20000;
  const auto r = TrainPolicy(ds, enc, PolicyConfig{}, po, 3);
  ASSERT_EQ(r.loss_curve.front().first, 100);
  const double first = r.loss_curve.front().second;
  const double last = r.loss_curve.back().second;
  EXPECT_GE(first / last, 10.0) << first << " -> " << last;
}

}  // namespace
}  // namespace dadp
