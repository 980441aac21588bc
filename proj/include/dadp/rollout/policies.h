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

#ifndef DADP_ROLLOUT_POLICIES_H_
#define DADP_ROLLOUT_POLICIES_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dadp/dyncore/dataset.h"
#include "dadp/dyncore/envs.h"
#include "dadp/encoder/encoder.h"
#include "dadp/mixdiff/denoiser.h"

namespace dadp {

enum class ContextMode { kColdStart, kPersistent, kWarmStart };

std::string_view ContextModeName(ContextMode mode);
// "cold_start", "persistent" or "warm_start".
ContextMode ParseContextMode(std::string_view name);

enum class Provenance { kPolicyRollout, kExpert };

// Episodes recorded in one target domain. Only buffers produced by running
// the evaluated policy itself may feed a context.
struct RolloutBuffer {
  Provenance provenance = Provenance::kPolicyRollout;
  std::string producer;  // name of the policy that recorded the episodes
  std::vector<Trajectory> episodes;
};

struct ContextSource {
  ContextMode mode = ContextMode::kColdStart;
  const RolloutBuffer* buffer = nullptr;

  // Persistent and warm-start sources need a policy-produced buffer whose
  // episodes all hold at least `history` steps. Throws ValidationError, or
  // LineageError for an expert-produced buffer.
  void Validate(int history) const;
};

// What a policy sees at step t. `live` holds observations 0..t and actions
// 0..t-1 of the running episode. `state` is the full simulator state, read
// only by the privileged expert.
struct StepInput {
  int t = 0;
  const Trajectory* live = nullptr;
  EnvState state;
};

class PolicySession {
 public:
  virtual ~PolicySession() = default;
  virtual double Act(const StepInput& input) = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // A fresh per-episode session; `seed` drives every random choice in it.
  virtual std::unique_ptr<PolicySession> Begin(const DomainSpec& domain,
                                               const ContextSource& source,
                                               uint64_t seed) const = 0;
};

class ExpertPolicy : public Policy {
 public:
  explicit ExpertPolicy(Push1DConfig config) : config_(config) {}
  std::string name() const override { return "expert"; }
  std::unique_ptr<PolicySession> Begin(const DomainSpec& domain,
                                       const ContextSource& source,
                                       uint64_t seed) const override;

 private:
  Push1DConfig config_;
};

// Uniform actions in [-u_max, u_max].
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(double u_max) : u_max_(u_max) {}
  std::string name() const override { return "random"; }
  std::unique_ptr<PolicySession> Begin(const DomainSpec& domain,
                                       const ContextSource& source,
                                       uint64_t seed) const override;

 private:
  double u_max_;
};

// Diffusion policy over the observation-only history. At step t the
// encoder context is chosen by the source mode:
//   cold start  - the live rows t-H .. t-1, zero-padded before step 0;
//   persistent  - one clip of H rows drawn from the buffer per episode;
//   warm start  - the persistent clip while t < H, then the live rows.
// The inpainted window always uses the live history.
class DiffusionPolicy : public Policy {
 public:
  DiffusionPolicy(Denoiser denoiser, EncoderBundle encoder, double u_max,
                  std::string label = "diffusion");
  std::string name() const override { return label_; }
  std::unique_ptr<PolicySession> Begin(const DomainSpec& domain,
                                       const ContextSource& source,
                                       uint64_t seed) const override;

  const Denoiser& denoiser() const { return denoiser_; }
  const EncoderBundle& encoder() const { return encoder_; }
  const WindowLayout& layout() const { return denoiser_.layout(); }
  double u_max() const { return u_max_; }

  // Standardized window for step t of `live`: history rows t-H .. t-1
  // (zero before step 0) and the current observation.
  Eigen::VectorXd LiveWindow(const Trajectory& live, int t) const;

 private:
  Denoiser denoiser_;
  EncoderBundle encoder_;
  double u_max_;
  std::string label_;
};

}  // namespace dadp

#endif  // DADP_ROLLOUT_POLICIES_H_
