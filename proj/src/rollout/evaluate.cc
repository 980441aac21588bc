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

#include "dadp/rollout/evaluate.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dadp/errors.h"
#include "dadp/nnmath/parallel.h"
#include "dadp/nnmath/rng.h"
#include "dadp/rollout/rollout.h"

namespace dadp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double Mean(std::span<const double> v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double PopulationStd(std::span<const double> v) {
  if (v.empty()) return kNaN;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

bool Same(double a, double b) {
  return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string Fixed(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

EnvState InitialState(const EvalOptions& o, int domain, int episode) {
  Rng rng(DeriveSeed(o.env_seed, domain, episode));
  return SampleInitialState(EnvId::kPush1D, o.env, rng);
}

uint64_t SessionSeed(const EvalOptions& o, int domain, int episode) {
  return DeriveSeed(DeriveSeed(o.env_seed, 7), domain, episode);
}

}  // namespace

double NormalizedScore(double ret, double expert, double random) {
  const double span = expert - random;
  if (std::abs(span) < 1e-12) return kNaN;
  return (ret - random) / span;
}

double MasteryRatio(std::span<const double> normalized, double threshold) {
  if (normalized.empty()) return kNaN;
  int hit = 0;
  for (double v : normalized) hit += v >= threshold ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(normalized.size());
}

bool EvalReport::operator==(const EvalReport& o) const {
  if (seeds != o.seeds || domains.size() != o.domains.size()) return false;
  if (!Same(iid_normalized, o.iid_normalized) ||
      !Same(iid_normalized_std, o.iid_normalized_std) ||
      !Same(ood_normalized, o.ood_normalized) ||
      !Same(ood_normalized_std, o.ood_normalized_std) ||
      !Same(mastery, o.mastery) || !Same(mastery_std, o.mastery_std)) {
    return false;
  }
  for (size_t i = 0; i < domains.size(); ++i) {
    const DomainEval &a = domains[i], &b = o.domains[i];
    if (a.iid != b.iid || a.mastered != b.mastered ||
        a.domain.params != b.domain.params ||
        a.seed_returns.size() != b.seed_returns.size()) {
      return false;
    }
    for (size_t s = 0; s < a.seed_returns.size(); ++s) {
      if (!Same(a.seed_returns[s], b.seed_returns[s])) return false;
    }
    if (!Same(a.expert_return, b.expert_return) ||
        !Same(a.random_return, b.random_return) ||
        !Same(a.normalized, b.normalized)) {
      return false;
    }
  }
  return true;
}

EvalReport Evaluate(std::span<const Policy* const> seed_policies,
                    const std::vector<DomainSpec>& iid,
                    const std::vector<DomainSpec>& ood,
                    const EvalOptions& options, const BufferTable* buffers,
                    BufferTable* record) {
  if (iid.empty()) throw ValidationError("evaluation needs IID domains");
  if (seed_policies.empty()) throw ValidationError("no policies to evaluate");
  if (options.episodes_per_domain < 1) {
    throw ValidationError("episodes per domain must be positive");
  }
  std::vector<DomainSpec> domains = iid;
  domains.insert(domains.end(), ood.begin(), ood.end());
  for (const auto& d : domains) {
    if (d.env != EnvId::kPush1D) {
      throw ValidationError("evaluation needs an environment with actions");
    }
    d.Validate();
  }
  const int nd = static_cast<int>(domains.size());
  const int ne = options.episodes_per_domain;
  const int ns = static_cast<int>(seed_policies.size());
  if (options.mode != ContextMode::kColdStart) {
    if (buffers == nullptr || static_cast<int>(buffers->size()) != ns) {
      throw ValidationError("context mode needs one buffer set per seed");
    }
    for (const auto& row : *buffers) {
      if (static_cast<int>(row.size()) != nd) {
        throw ValidationError("context mode needs one buffer per domain");
      }
    }
  }

  // References on the shared initial states.
  const ExpertPolicy expert(options.env.push1d);
  const RandomPolicy random(options.env.push1d.u_max);
  std::vector<double> expert_ret(nd * ne), random_ret(nd * ne);
  ParallelFor(nd * ne, options.threads, [&](int job) {
    const int d = job / ne, e = job % ne;
    const EnvState init = InitialState(options, d, e);
    const ContextSource cold;
    expert_ret[job] =
        RolloutEpisode(expert, domains[d], options.env, init, cold, 0)
            .episode_return;
    random_ret[job] =
        RolloutEpisode(random, domains[d], options.env, init, cold,
                       DeriveSeed(DeriveSeed(options.env_seed, 8), d, e))
            .episode_return;
  });

  std::vector<EpisodeResult> runs(static_cast<size_t>(ns) * nd * ne);
  ParallelFor(ns * nd * ne, options.threads, [&](int job) {
    const int s = job / (nd * ne), d = (job / ne) % nd, e = job % ne;
    ContextSource source;
    source.mode = options.mode;
    if (options.mode != ContextMode::kColdStart) source.buffer = &(*buffers)[s][d];
    runs[job] = RolloutEpisode(*seed_policies[s], domains[d], options.env,
                               InitialState(options, d, e), source,
                               SessionSeed(options, d, e));
  });

  EvalReport report;
  report.seeds = ns;
  std::vector<std::vector<double>> iid_norm(ns), ood_norm(ns);
  for (int d = 0; d < nd; ++d) {
    DomainEval de;
    de.domain = domains[d];
    de.iid = d < static_cast<int>(iid.size());
    de.expert_return =
        Mean(std::span(expert_ret).subspan(static_cast<size_t>(d) * ne, ne));
    de.random_return =
        Mean(std::span(random_ret).subspan(static_cast<size_t>(d) * ne, ne));
    for (int s = 0; s < ns; ++s) {
      double sum = 0.0;
      for (int e = 0; e < ne; ++e) {
        sum += runs[(static_cast<size_t>(s) * nd + d) * ne + e].episode_return;
      }
      const double r = sum / ne;
      de.seed_returns.push_back(r);
      const double n = NormalizedScore(r, de.expert_return, de.random_return);
      de.seed_normalized.push_back(n);
      (de.iid ? iid_norm : ood_norm)[s].push_back(n);
    }
    de.mean_return = Mean(de.seed_returns);
    de.std_return = PopulationStd(de.seed_returns);
    de.normalized =
        NormalizedScore(de.mean_return, de.expert_return, de.random_return);
    de.mastered = de.normalized >= options.mastery_threshold;
    report.domains.push_back(std::move(de));
  }
  std::vector<double> iid_s, ood_s, mastery_s;
  for (int s = 0; s < ns; ++s) {
    iid_s.push_back(Mean(iid_norm[s]));
    if (!ood_norm[s].empty()) ood_s.push_back(Mean(ood_norm[s]));
    mastery_s.push_back(MasteryRatio(iid_norm[s], options.mastery_threshold));
  }
  report.iid_normalized = Mean(iid_s);
  report.iid_normalized_std = PopulationStd(iid_s);
  report.ood_normalized = Mean(ood_s);
  report.ood_normalized_std = PopulationStd(ood_s);
  report.mastery = Mean(mastery_s);
  report.mastery_std = PopulationStd(mastery_s);

  if (record != nullptr) {
    record->assign(ns, std::vector<RolloutBuffer>(nd));
    for (int s = 0; s < ns; ++s) {
      for (int d = 0; d < nd; ++d) {
        RolloutBuffer& buf = (*record)[s][d];
        buf.provenance = Provenance::kPolicyRollout;
        buf.producer = seed_policies[s]->name();
        for (int e = 0; e < ne; ++e) {
          buf.episodes.push_back(
              runs[(static_cast<size_t>(s) * nd + d) * ne + e].trajectory);
        }
      }
    }
  }
  return report;
}

std::string EvalReportToCsv(const EvalReport& report) {
  size_t pd = 0;
  for (const auto& d : report.domains) pd = std::max(pd, d.domain.params.size());
  std::string out = "domain_index,split";
  for (size_t j = 0; j < pd; ++j) out += ",xi_" + std::to_string(j);
  out += ",mean_return,std,normalized,mastered,expert_return,random_return\n";
  for (size_t i = 0; i < report.domains.size(); ++i) {
    const DomainEval& d = report.domains[i];
    out += std::to_string(i) + (d.iid ? ",iid" : ",ood");
    for (size_t j = 0; j < pd; ++j) {
      out += ',' + (j < d.domain.params.size() ? Num(d.domain.params[j]) : "");
    }
    out += ',' + Num(d.mean_return) + ',' + Num(d.std_return) + ',' +
           Num(d.normalized) + ',' + (d.mastered ? "1" : "0") + ',' +
           Num(d.expert_return) + ',' + Num(d.random_return) + '\n';
  }
  return out;
}

std::string EvalReportToText(const EvalReport& report) {
  int n_iid = 0;
  for (const auto& d : report.domains) n_iid += d.iid ? 1 : 0;
  const int n_ood = static_cast<int>(report.domains.size()) - n_iid;
  std::string out;
  out += "seeds            " + std::to_string(report.seeds) + '\n';
  out += "IID normalized   " + Fixed(report.iid_normalized) + " +- " +
         Fixed(report.iid_normalized_std) + "  (" + std::to_string(n_iid) +
         " domains)\n";
  out += "OOD normalized   " + Fixed(report.ood_normalized) + " +- " +
         Fixed(report.ood_normalized_std) + "  (" + std::to_string(n_ood) +
         " domains)\n";
  out += "Mastery          " + Fixed(report.mastery) + " +- " +
         Fixed(report.mastery_std) + '\n';
  return out;
}

SweepResult SweepGuidance(const PolicyFactory& factory,
                          const std::vector<double>& lambdas,
                          const std::vector<DomainSpec>& iid,
                          const std::vector<DomainSpec>& ood,
                          const EvalOptions& options) {
  SweepResult result;
  std::vector<double> seen;
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw ValidationError("guidance scale must be finite and non-negative");
    }
    if (std::find(seen.begin(), seen.end(), lambda) != seen.end()) {
      result.warnings.push_back("duplicate guidance scale " + Num(lambda) +
                                " skipped");
      continue;
    }
    seen.push_back(lambda);
  }
  for (double lambda : seen) {
    const auto owned = factory(lambda);
    std::vector<const Policy*> ptrs;
    for (const auto& p : owned) ptrs.push_back(p.get());
    result.rows.push_back({lambda, Evaluate(ptrs, iid, ood, options)});
  }
  return result;
}

std::string SweepToCsv(const SweepResult& sweep) {
  std::string out =
      "lambda,iid_normalized,iid_std,ood_normalized,ood_std,mastery,"
      "mastery_std\n";
  for (const auto& row : sweep.rows) {
    const EvalReport& r = row.report;
    out += Num(row.lambda) + ',' + Num(r.iid_normalized) + ',' +
           Num(r.iid_normalized_std) + ',' + Num(r.ood_normalized) + ',' +
           Num(r.ood_normalized_std) + ',' + Num(r.mastery) + ',' +
           Num(r.mastery_std) + '\n';
  }
  return out;
}

double ContextComparison::iid_spread() const {
  const double a = cold_start.iid_normalized, b = persistent.iid_normalized,
               c = warm_start.iid_normalized;
  return std::max({a, b, c}) - std::min({a, b, c});
}

ContextComparison CompareContextSources(
    std::span<const Policy* const> seed_policies,
    const std::vector<DomainSpec>& iid, const std::vector<DomainSpec>& ood,
    const EvalOptions& options) {
  ContextComparison cmp;
  EvalOptions o = options;
  o.mode = ContextMode::kColdStart;
  BufferTable buffers;
  cmp.cold_start = Evaluate(seed_policies, iid, ood, o, nullptr, &buffers);
  o.mode = ContextMode::kPersistent;
  cmp.persistent = Evaluate(seed_policies, iid, ood, o, &buffers);
  o.mode = ContextMode::kWarmStart;
  cmp.warm_start = Evaluate(seed_policies, iid, ood, o, &buffers);
  return cmp;
}

std::string ContextComparisonToCsv(const ContextComparison& cmp) {
  std::string out =
      "mode,iid_normalized,iid_std,ood_normalized,ood_std,mastery\n";
  const std::pair<ContextMode, const EvalReport*> rows[] = {
      {ContextMode::kColdStart, &cmp.cold_start},
      {ContextMode::kPersistent, &cmp.persistent},
      {ContextMode::kWarmStart, &cmp.warm_start}};
  for (const auto& [mode, r] : rows) {
    out += std::string(ContextModeName(mode)) + ',' + Num(r->iid_normalized) +
           ',' + Num(r->iid_normalized_std) + ',' + Num(r->ood_normalized) +
           ',' + Num(r->ood_normalized_std) + ',' + Num(r->mastery) + '\n';
  }
  return out;
}

}  // namespace dadp
