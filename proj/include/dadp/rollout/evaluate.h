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

#ifndef DADP_ROLLOUT_EVALUATE_H_
#define DADP_ROLLOUT_EVALUATE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dadp/dyncore/envs.h"
#include "dadp/rollout/policies.h"

namespace dadp {

struct EvalOptions {
  int episodes_per_domain = 20;
  // Seeds the initial states; shared by every policy and reference.
  uint64_t env_seed = 0;
  int threads = 1;
  ContextMode mode = ContextMode::kColdStart;
  EnvConfig env;
  double mastery_threshold = 0.6;
};

struct DomainEval {
  DomainSpec domain;
  bool iid = true;
  std::vector<double> seed_returns;     // mean return per policy seed
  std::vector<double> seed_normalized;  // per policy seed
  double mean_return = 0.0;             // over seeds
  double std_return = 0.0;              // population std over seeds
  double expert_return = 0.0;
  double random_return = 0.0;
  double normalized = 0.0;  // of mean_return
  bool mastered = false;    // normalized >= threshold
};

struct EvalReport {
  std::vector<DomainEval> domains;  // IID domains first, then OOD
  int seeds = 0;
  // Means over domains, then mean and std over policy seeds.
  double iid_normalized = 0.0;
  double iid_normalized_std = 0.0;
  double ood_normalized = 0.0;
  double ood_normalized_std = 0.0;
  // Fraction of IID domains at or above the threshold, mean over seeds.
  double mastery = 0.0;
  double mastery_std = 0.0;

  bool operator==(const EvalReport&) const;
};

// (R - R_random) / (R_expert - R_random). NaN when the references coincide.
double NormalizedScore(double ret, double expert, double random);

// Fraction of entries at or above the threshold.
double MasteryRatio(std::span<const double> normalized, double threshold);

// Optional buffers, indexed [seed][domain] in report order.
using BufferTable = std::vector<std::vector<RolloutBuffer>>;

// Rolls out each policy (one per training seed) on every domain. The
// expert and random references use the same initial states. With
// `record` set, the episodes of every (seed, domain) are stored as buffers
// for later context sources. `buffers` supplies them for persistent and
// warm-start modes. Domain lists must be non-empty (OOD may be empty).
EvalReport Evaluate(std::span<const Policy* const> seed_policies,
                    const std::vector<DomainSpec>& iid,
                    const std::vector<DomainSpec>& ood,
                    const EvalOptions& options,
                    const BufferTable* buffers = nullptr,
                    BufferTable* record = nullptr);

// Columns: domain_index, split, xi_*, mean_return, std, normalized,
// mastered, expert_return, random_return.
std::string EvalReportToCsv(const EvalReport& report);
std::string EvalReportToText(const EvalReport& report);

using PolicyFactory =
    std::function<std::vector<std::unique_ptr<Policy>>(double lambda)>;

struct SweepRow {
  double lambda = 0.0;
  EvalReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

// One report per distinct lambda, in first-seen order. Duplicates are
// skipped with a warning; negative values raise ValidationError.
SweepResult SweepGuidance(const PolicyFactory& factory,
                          const std::vector<double>& lambdas,
                          const std::vector<DomainSpec>& iid,
                          const std::vector<DomainSpec>& ood,
                          const EvalOptions& options);

// Columns: lambda, iid_normalized, iid_std, ood_normalized, ood_std,
// mastery, mastery_std.
std::string SweepToCsv(const SweepResult& sweep);

struct ContextComparison {
  EvalReport cold_start;
  EvalReport persistent;
  EvalReport warm_start;

  // Largest minus smallest IID normalized score over the three modes.
  double iid_spread() const;
};

// Cold start first; its own episodes become the buffers of the other two.
ContextComparison CompareContextSources(
    std::span<const Policy* const> seed_policies,
    const std::vector<DomainSpec>& iid, const std::vector<DomainSpec>& ood,
    const EvalOptions& options);

// Columns: mode, iid_normalized, iid_std, ood_normalized, ood_std, mastery.
std::string ContextComparisonToCsv(const ContextComparison& cmp);

}  // namespace dadp

#endif  // DADP_ROLLOUT_EVALUATE_H_
