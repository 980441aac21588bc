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

#include "dadp/rollout/policies.h"

#include <algorithm>
#include <string>
#include <utility>

#include "dadp/errors.h"
#include "dadp/mixdiff/policy.h"
#include "dadp/nnmath/rng.h"

namespace dadp {

std::string_view ContextModeName(ContextMode mode) {
  switch (mode) {
    case ContextMode::kColdStart: return "cold_start";
    case ContextMode::kPersistent: return "persistent";
    case ContextMode::kWarmStart: return "warm_start";
  }
  return "unknown";
}

ContextMode ParseContextMode(std::string_view name) {
  for (ContextMode m : {ContextMode::kColdStart, ContextMode::kPersistent,
                        ContextMode::kWarmStart}) {
    if (ContextModeName(m) == name) return m;
  }
  throw ValidationError("unknown context source '" + std::string(name) + "'");
}

void ContextSource::Validate(int history) const {
  if (mode == ContextMode::kColdStart) return;
  if (buffer == nullptr || buffer->episodes.empty()) {
    throw ValidationError(std::string(ContextModeName(mode)) +
                          " context needs a rollout buffer");
  }
  if (buffer->provenance != Provenance::kPolicyRollout) {
    throw LineageError("context buffers must come from the policy's own "
                       "rollouts, not from expert data");
  }
  for (const auto& ep : buffer->episodes) {
    if (ep.length < history) {
      throw ValidationError("rollout buffer episode shorter than the history");
    }
  }
}

namespace {

class ExpertSession : public PolicySession {
 public:
  ExpertSession(double m, double c, Push1DConfig config)
      : m_(m), c_(c), config_(config) {}
  double Act(const StepInput& in) override {
    return ExpertActionPush1D(in.state, m_, c_, config_);
  }

 private:
  double m_, c_;
  Push1DConfig config_;
};

class RandomSession : public PolicySession {
 public:
  RandomSession(double u_max, uint64_t seed) : u_max_(u_max), rng_(seed) {}
  double Act(const StepInput&) override {
    return rng_.Uniform(-u_max_, u_max_);
  }

 private:
  double u_max_;
  Rng rng_;
};

constexpr uint64_t kClipStream = 0xc11b;

class DiffusionSession : public PolicySession {
 public:
  DiffusionSession(const DiffusionPolicy& policy, const ContextSource& source,
                   uint64_t seed)
      : policy_(policy), mode_(source.mode), rng_(seed) {
    const EncoderBundle& enc = policy_.encoder();
    clip_ = Eigen::VectorXd::Zero(enc.history * enc.token_dim());
    if (mode_ != ContextMode::kColdStart) {
      // Own stream, so every mode sees the same sampling noise per step.
      Rng clip_rng(DeriveSeed(seed, kClipStream));
      const auto& eps = source.buffer->episodes;
      const Trajectory& ep = eps[clip_rng.UniformInt(eps.size())];
      const int end =
          enc.history - 1 +
          static_cast<int>(clip_rng.UniformInt(ep.length - enc.history + 1));
      FillTrajectoryContext(ep, end, enc.history, enc.scaler, clip_);
    }
  }

  double Act(const StepInput& in) override {
    const EncoderBundle& enc = policy_.encoder();
    const WindowLayout& layout = policy_.layout();
    const Eigen::VectorXd window = policy_.LiveWindow(*in.live, in.t);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(layout.token_dim());
    if (policy_.denoiser().config().uses_z()) {
      const bool use_clip =
          mode_ == ContextMode::kPersistent ||
          (mode_ == ContextMode::kWarmStart && in.t < enc.history);
      z = use_clip ? enc.encoder.Forward(clip_).col(0)
                   : enc.encoder.Forward(window.head(clip_.size())).col(0);
    }
    Eigen::VectorXd eps(layout.size());
    for (int i = 0; i < layout.size(); ++i) eps[i] = rng_.Normal();
    const Eigen::MatrixXd x0 =
        SampleWindows(policy_.denoiser(), layout, policy_.denoiser().config(),
                      window, z, eps);
    const Eigen::VectorXd a = ExtractAction(x0.col(0), layout);
    const double u = enc.scaler.act.Invert(a[0], 0);
    return std::clamp(u, -policy_.u_max(), policy_.u_max());
  }

 private:
  const DiffusionPolicy& policy_;
  ContextMode mode_;
  Rng rng_;
  Eigen::VectorXd clip_;
};

}  // namespace

std::unique_ptr<PolicySession> ExpertPolicy::Begin(const DomainSpec& domain,
                                                   const ContextSource&,
                                                   uint64_t) const {
  if (domain.env != EnvId::kPush1D) {
    throw ValidationError("the expert controller is defined for Push1D only");
  }
  return std::make_unique<ExpertSession>(domain.params[0], domain.params[1],
                                         config_);
}

std::unique_ptr<PolicySession> RandomPolicy::Begin(const DomainSpec&,
                                                   const ContextSource&,
                                                   uint64_t seed) const {
  return std::make_unique<RandomSession>(u_max_, seed);
}

DiffusionPolicy::DiffusionPolicy(Denoiser denoiser, EncoderBundle encoder,
                                 double u_max, std::string label)
    : denoiser_(std::move(denoiser)), encoder_(std::move(encoder)),
      u_max_(u_max), label_(std::move(label)) {
  const WindowLayout& l = denoiser_.layout();
  if (l.history != encoder_.history || l.obs_dim != encoder_.obs_dim ||
      l.act_dim != encoder_.act_dim) {
    throw ValidationError("policy and encoder disagree on the window");
  }
  if (l.act_dim != 1) {
    throw ValidationError("diffusion policy expects a scalar action");
  }
}

std::unique_ptr<PolicySession> DiffusionPolicy::Begin(
    const DomainSpec& domain, const ContextSource& source,
    uint64_t seed) const {
  if (domain.env != EnvId::kPush1D) {
    throw ValidationError("diffusion policies need an environment with actions");
  }
  source.Validate(encoder_.history);
  return std::make_unique<DiffusionSession>(*this, source, seed);
}

Eigen::VectorXd DiffusionPolicy::LiveWindow(const Trajectory& live,
                                            int t) const {
  const WindowLayout& l = layout();
  const TokenScaler& sc = encoder_.scaler;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(l.size());
  for (int r = 0; r < l.history; ++r) {
    const int step = t - l.history + r;
    if (step < 0) continue;
    for (int i = 0; i < l.obs_dim; ++i) {
      w[l.index(r, i)] = sc.obs.Apply(live.obs(step, i), i);
    }
    for (int j = 0; j < l.act_dim; ++j) {
      w[l.index(r, l.obs_dim + j)] = sc.act.Apply(live.action(step, j), j);
    }
  }
  for (int i = 0; i < l.obs_dim; ++i) {
    w[l.index(l.current_row(), i)] = sc.obs.Apply(live.obs(t, i), i);
  }
  return w;
}

}  // namespace dadp
