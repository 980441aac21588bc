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

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dadp/dyncore/dataset.h"
#include "dadp/dyncore/dataset_io.h"
#include "dadp/dyncore/envs.h"
#include "dadp/dyncore/oracle.h"
#include "dadp/errors.h"
#include "dadp/nnmath/rng.h"
#include "support/temp_dir.h"

namespace dadp {
namespace {

TEST(BallDropTest, HandSteps) {
  EnvState s = StepBallDrop({0.0, 0.0}, 1.0, -1.0);
  EXPECT_DOUBLE_EQ(s.position, -0.5);
  EXPECT_DOUBLE_EQ(s.velocity, -1.0);
  s = StepBallDrop(s, 1.0, -1.0);
  EXPECT_DOUBLE_EQ(s.position, -2.0);
  EXPECT_DOUBLE_EQ(s.velocity, -2.0);
}

TEST(BallDropTest, ZeroGravityCoasts) {
  const EnvState s = StepBallDrop({3.0, 0.7}, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(s.velocity, 0.7);
  EXPECT_DOUBLE_EQ(s.position, 3.35);
}

TEST(BallDropTest, MatchesClosedForm) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const double y0 = rng.Uniform(0, 1000), v0 = rng.Uniform(-1, 1);
    const double g = rng.Uniform(-2, -0.5), t0 = rng.Uniform(0.5, 1.5);
    EnvState s{y0, v0};
    for (int t = 1; t <= 64; ++t) {
      s = StepBallDrop(s, t0, g);
      const double tau = t * t0;
      ASSERT_NEAR(s.position, y0 + v0 * tau + 0.5 * g * tau * tau, 1e-9);
    }
  }
}

TEST(Push1DTest, HandSteps) {
  EnvState s = StepPush1D({0.0, 0.0}, 1.0, 1.0, 0.0, 0.05, 3.0);
  EXPECT_NEAR(s.velocity, 0.05, 1e-15);
  EXPECT_NEAR(s.position, 0.0025, 1e-15);
  s = StepPush1D({0.0, 1.0}, 0.0, 2.0, 2.0, 0.05, 3.0);
  EXPECT_NEAR(s.velocity, 0.95, 1e-15);
  EXPECT_NEAR(s.position, 0.0475, 1e-15);
}

TEST(Push1DTest, ForceFreeKeepsVelocity) {
  const EnvState s = StepPush1D({0.3, -0.4}, 0.0, 1.7, 0.0, 0.05, 3.0);
  EXPECT_EQ(s.velocity, -0.4);
}

TEST(Push1DTest, RejectsOutOfRangeAction) {
  EXPECT_THROW(StepPush1D({0, 0}, 3.5, 1.0, 0.0, 0.05, 3.0), ValidationError);
}

TEST(Push1DTest, ExpertExamples) {
  Push1DConfig cfg;
  EXPECT_DOUBLE_EQ(ExpertActionPush1D({0.0, 0.0}, 1.0, 0.0, cfg), 3.0);
  EXPECT_DOUBLE_EQ(ExpertActionPush1D({cfg.x_target, 0.0}, 1.0, 0.0, cfg), 0.0);
  EXPECT_DOUBLE_EQ(ExpertActionPush1D({0.0, 0.0}, 2.0, 0.0, cfg), 3.0);
  // Unclipped interior: m (kp (x* - x) - kd v) + c v.
  EXPECT_NEAR(ExpertActionPush1D({0.9, 0.1}, 1.5, 0.5, cfg),
              1.5 * (4.0 * 0.1 - 3.0 * 0.1) + 0.5 * 0.1, 1e-15);
}

TEST(Push1DTest, ExpertReachesTargetOnEveryGridDomain) {
  EnvConfig cfg;
  for (int count : {9, 25}) {
    for (const DomainSpec& d : TrainingGrid(EnvId::kPush1D, count, cfg)) {
      Rng rng(DeriveSeed(3, count));
      for (int e = 0; e < 10; ++e) {
        const EnvState init = SampleInitialState(EnvId::kPush1D, cfg, rng);
        const Trajectory tr = SimulateExpertEpisode(d, init, 64, cfg);
        const double x_last = tr.obs(63);
        EXPECT_LT(std::abs(x_last - cfg.push1d.x_target), 0.05)
            << "m=" << d.params[0] << " c=" << d.params[1];
      }
    }
  }
}

TEST(FitGTest, Examples) {
  const std::array<double, 3> fall{0.0, -0.5, -2.0};
  const GravityFit f = FitGFromContext(fall, 1.0);
  EXPECT_DOUBLE_EQ(f.g, -1.0);
  EXPECT_DOUBLE_EQ(f.v_last, -2.0);
  const std::array<double, 3> still{4.0, 4.0, 4.0};
  const GravityFit s = FitGFromContext(still, 1.0);
  EXPECT_EQ(s.g, 0.0);
  EXPECT_EQ(s.v_last, 0.0);
}

TEST(GridTest, Shapes) {
  EnvConfig cfg;
  const auto push = TrainingGrid(EnvId::kPush1D, 9, cfg);
  ASSERT_EQ(push.size(), 9u);
  std::set<std::pair<double, double>> distinct;
  for (const auto& d : push) {
    d.Validate();
    distinct.insert({d.params[0], d.params[1]});
  }
  EXPECT_EQ(distinct.size(), 9u);
  EXPECT_THROW(TrainingGrid(EnvId::kPush1D, 10, cfg), ValidationError);
  const auto ball = TrainingGrid(EnvId::kBallDrop, 10, cfg);
  ASSERT_EQ(ball.size(), 10u);
  EXPECT_DOUBLE_EQ(ball.front().params[0], -2.0);
  EXPECT_DOUBLE_EQ(ball.back().params[0], -0.5);
}

TEST(GridTest, OodDomainsAreOffGridAndInBounds) {
  EnvConfig cfg;
  const auto grid = TrainingGrid(EnvId::kPush1D, 9, cfg);
  const auto ood = SampleOodDomains(grid, 5, 3);
  ASSERT_EQ(ood.size(), 5u);
  for (const auto& d : ood) {
    d.Validate();
    for (const auto& g : grid) {
      bool near_all = true;
      for (size_t j = 0; j < d.params.size(); ++j) {
        near_all &= std::abs(d.params[j] - g.params[j]) <
                    0.05 * d.bounds[j].width();
      }
      EXPECT_FALSE(near_all);
    }
  }
  EXPECT_EQ(SampleOodDomains(grid, 5, 3)[2].params, ood[2].params);
}

Dataset SmallPush(uint64_t seed, int threads = 1) {
  EnvConfig cfg;
  return GenerateDataset(TrainingGrid(EnvId::kPush1D, 9, cfg), 20, 64, seed,
                         cfg, 20, threads);
}

TEST(DatasetTest, PushCounts) {
  const Dataset ds = SmallPush(1);
  EXPECT_EQ(ds.TrajectoryCount(), 180);
  for (const auto& d : ds.domains) {
    for (const auto& e : d.episodes) EXPECT_EQ(e.length, 64);
  }
  EXPECT_EQ(ds.obs_dim, 1);
  EXPECT_EQ(ds.act_dim, 1);
  EXPECT_EQ(ds.param_dim, 2);
}

TEST(DatasetTest, DeterministicAcrossThreads) {
  EXPECT_TRUE(SmallPush(5, 1) == SmallPush(5, 1));
  EXPECT_TRUE(SmallPush(5, 1) == SmallPush(5, 4));
  EXPECT_FALSE(SmallPush(5) == SmallPush(6));
}

TEST(DatasetTest, RejectsShortOrThinDatasets) {
  EnvConfig cfg;
  const auto grid = TrainingGrid(EnvId::kPush1D, 4, cfg);
  EXPECT_THROW(GenerateDataset(grid, 20, 10, 0, cfg, 20), ValidationError);
  EXPECT_THROW(GenerateDataset(grid, 1, 64, 0, cfg, 20), ValidationError);
}

TEST(DatasetTest, BallDropRefitRecoversGravity) {
  EnvConfig cfg;
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kBallDrop, 10, cfg),
                                     10, 32, 2, cfg, 20);
  EXPECT_EQ(ds.TrajectoryCount(), 100);
  EXPECT_EQ(ds.act_dim, 0);
  double worst = 0.0;
  for (const auto& d : ds.domains) {
    for (const auto& e : d.episodes) {
      for (int t = 2; t < e.length; ++t) {
        const std::array<double, 3> y{e.obs(t - 2), e.obs(t - 1), e.obs(t)};
        worst = std::max(worst,
                         std::abs(FitGFromContext(y, 1.0).g - d.params[0]));
      }
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(DatasetTest, SplitKeepsEpisodesDisjoint) {
  const Dataset ds = SmallPush(2);
  const TrajectorySplit s = SplitByTrajectory(ds, 0.8, 4, 2);
  EXPECT_EQ(s.train.size() + s.validation.size(), 180u);
  std::set<std::pair<int, int>> train;
  for (const auto& r : s.train) train.insert({r.domain, r.episode});
  for (const auto& r : s.validation) {
    EXPECT_FALSE(train.contains({r.domain, r.episode}));
  }
  for (int d = 0; d < 9; ++d) {
    int n = 0;
    for (const auto& r : s.validation) n += r.domain == d;
    EXPECT_EQ(n, 4);
  }
}

TEST(DatasetTest, SplitHonoursMinimumPerSide) {
  EnvConfig cfg;
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kPush1D, 4, cfg), 4,
                                     64, 0, cfg, 20);
  const TrajectorySplit s = SplitByTrajectory(ds, 0.9, 1, 2);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.validation.size(), 8u);
}

TEST(DatasetIoTest, RoundTripEqualsFloatRounding) {
  const Dataset ds = SmallPush(3);
  testing::TempDir dir("io");
  SaveDataset(ds, dir.path() / "d.bin");
  const Dataset back = LoadDataset(dir.path() / "d.bin");
  EXPECT_TRUE(back == RoundDatasetToFloat(ds));
  EXPECT_TRUE(RoundDatasetToFloat(back) == back);
  EXPECT_EQ(SerializeDataset(back), SerializeDataset(ds));
}

TEST(DatasetIoTest, RejectsTruncatedFile) {
  std::vector<char> bytes = SerializeDataset(SmallPush(3));
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(ParseDataset(bytes), IoError);
}

TEST(DatasetIoTest, CsvHasOneRowPerStep) {
  EnvConfig cfg;
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kPush1D, 4, cfg), 2,
                                     20, 0, cfg, 20);
  const std::string csv = DatasetToCsv(ds);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(lines, 1 + 4 * 2 * 20);
  EXPECT_EQ(csv.rfind("domain_index,", 0), 0u);
}

TEST(LagRuleTest, Parse) {
  EXPECT_EQ(LagRule::Parse("inf"), LagRule::Infinite());
  EXPECT_EQ(LagRule::Parse("32"), LagRule::Finite(32));
  EXPECT_EQ(LagRule::Finite(4).ToString(), "4");
  EXPECT_THROW(LagRule::Parse("0"), ValidationError);
  EXPECT_THROW(LagRule::Parse("-1"), ValidationError);
  EXPECT_THROW(LagRule::Parse("abc"), ValidationError);
}

TEST(OracleTest, FiniteLagIsExact) {
  EnvConfig cfg;
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kBallDrop, 10, cfg),
                                     10, 32, 4, cfg, 20);
  const auto eps = AllEpisodes(ds);
  EXPECT_LT(BallDropOracleMse(ds, LagRule::Finite(1), 16, cfg.balldrop, eps),
            1e-12);
  EXPECT_THROW(BallDropOracleMse(ds, LagRule::Finite(32), 16, cfg.balldrop, eps),
               ValidationError);
}

TEST(OracleTest, InfiniteLagPositiveWithRandomStarts) {
  EnvConfig cfg;
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kBallDrop, 10, cfg),
                                     10, 32, 4, cfg, 20);
  const double mse = BallDropOracleMse(ds, LagRule::Infinite(), 16,
                                       cfg.balldrop, AllEpisodes(ds));
  EXPECT_GT(mse, 0.0);
  // Bayes predictor never loses to the velocity-blind one in expectation.
  EXPECT_LT(mse, BallDropOracleMse(ds, LagRule::Infinite(), 16, cfg.balldrop,
                                   AllEpisodes(ds),
                                   BallDropPredictor::kDomainMeanVelocity));
}

TEST(OracleTest, SharedStartsGiveZero) {
  EnvConfig cfg;
  cfg.balldrop.y0 = {500.0, 500.0};
  cfg.balldrop.v0 = {0.3, 0.3};
  const Dataset ds = GenerateDataset(TrainingGrid(EnvId::kBallDrop, 5, cfg), 4,
                                     32, 1, cfg, 20);
  EXPECT_LT(BallDropOracleMse(ds, LagRule::Infinite(), 16, cfg.balldrop,
                              AllEpisodes(ds)),
            1e-18);
}

TEST(OracleTest, PosteriorVelocityMatchesMonteCarlo) {
  BallDropConfig cfg;
  cfg.y0 = {0.0, 10.0};
  const double g = -1.0;
  const int len = 8;
  // Sample (t, y0, v0) from the generating distribution, keep draws whose
  // y_t falls in a thin slab around y, average v_t.
  Rng rng(7);
  const double y = 4.0, half = 0.05;
  double sum = 0.0;
  long n = 0;
  for (int i = 0; i < 4000000; ++i) {
    const int t = static_cast<int>(rng.UniformInt(len - 1));
    const double y0 = rng.Uniform(0, 10), v0 = rng.Uniform(-1, 1);
    const double yt = y0 + v0 * t + 0.5 * g * t * t;
    if (std::abs(yt - y) < half) {
      sum += v0 + g * t;
      ++n;
    }
  }
  ASSERT_GT(n, 10000);
  EXPECT_NEAR(BallDropPosteriorVelocity(y, g, len, cfg), sum / n, 0.03);
}

}  // namespace
}  // namespace dadp
