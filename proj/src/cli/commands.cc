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

#include "dadp/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dadp/cli/artifacts.h"
#include "dadp/dyncore/dataset.h"
#include "dadp/dyncore/dataset_io.h"
#include "dadp/dyncore/oracle.h"
#include "dadp/encoder/context.h"
#include "dadp/encoder/encoder.h"
#include "dadp/encoder/probe.h"
#include "dadp/errors.h"
#include "dadp/mixdiff/policy.h"
#include "dadp/nnmath/binary_io.h"
#include "dadp/nnmath/checkpoint.h"
#include "dadp/nnmath/hash.h"
#include "dadp/nnmath/parallel.h"
#include "dadp/nnmath/rng.h"
#include "dadp/rollout/evaluate.h"

namespace dadp {
namespace fs = std::filesystem;

namespace {

// Stream tags for DeriveSeed(master, tag, ...).
constexpr uint64_t kDataTag = 100;
constexpr uint64_t kOodTag = 101;
constexpr uint64_t kEncoderTag = 200;
constexpr uint64_t kProbeClassifierTag = 300;
constexpr uint64_t kProbeRegressorTag = 301;
constexpr uint64_t kPolicyTag = 400;
constexpr uint64_t kEvalTag = 500;

const char* kDatasetFile = "dataset.bin";
const char* kEncoderFile = "encoder.ckpt";

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string Fixed(double v) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string Pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + ' ' : s + std::string(width - s.size(), ' ');
}

void Log(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n' << std::flush;
}

std::vector<DomainSpec> IidDomains(const ExperimentConfig& c) {
  return TrainingGrid(c.env.env, c.env.grid_size, c.env.physics);
}

std::vector<DomainSpec> OodDomains(const ExperimentConfig& c) {
  if (c.env.ood_count == 0) return {};
  return SampleOodDomains(IidDomains(c), c.env.ood_count,
                          DeriveSeed(c.seed, kOodTag));
}

Manifest NewManifest(const ExperimentConfig& c, const std::string& name,
                     uint64_t stage_hash) {
  Manifest m;
  m.name = name;
  m.kind = name;
  m.config_hash = ConfigHash(c);
  m.stage_hash = stage_hash;
  m.seed = c.seed;
  m.info["env"] = EnvName(c.env.env);
  return m;
}

void AddFile(Manifest& m, const fs::path& dir, const std::string& file) {
  m.files[file] = FileHashHex(dir / file);
}

void AddInput(Manifest& m, const fs::path& dir, const std::string& file) {
  m.inputs[file] = FileHashHex(dir / file);
}

void RequirePush1D(const ExperimentConfig& c, const char* verb) {
  if (c.env.env != EnvId::kPush1D) {
    throw ValidationError(std::string(verb) +
                          " needs a control task; env.name must be push1d");
  }
}

Dataset LoadRunDataset(const ExperimentConfig& c) {
  RequireUpstream(c.output_dir, "dataset", DataStageHash(c));
  Dataset ds = LoadDataset(c.output_dir / kDatasetFile);
  ds.Validate(c.min_episode_len());
  return ds;
}

EncoderBundle LoadRunEncoder(const ExperimentConfig& c) {
  RequireUpstream(c.output_dir, "encoder", EncoderStageHash(c));
  return EncoderFromCheckpoint(LoadCheckpoint(c.output_dir / kEncoderFile));
}

std::string PolicyStem(Variant v, uint64_t seed) {
  return "policy_" + std::string(VariantName(v)) + "_seed" +
         std::to_string(seed);
}

// Trained policies of one variant, one per evaluation seed.
std::vector<Denoiser> LoadRunPolicies(const ExperimentConfig& c, Variant v) {
  const uint64_t encoder_hash =
      Fnv1a64(std::span<const char>(ReadFileBytes(c.output_dir / kEncoderFile)));
  std::vector<Denoiser> out;
  for (uint64_t s : c.eval.seeds) {
    const fs::path file = c.output_dir / (PolicyStem(v, s) + ".ckpt");
    const Checkpoint ckpt = LoadCheckpoint(file);
    if (ckpt.meta("encoder_hash") != HashToHex(encoder_hash)) {
      throw LineageError(file.filename().string() +
                         " was trained against a different encoder");
    }
    out.push_back(PolicyFromCheckpoint(ckpt));
  }
  return out;
}

std::vector<std::unique_ptr<Policy>> MakePolicies(
    const std::vector<Denoiser>& denoisers, const EncoderBundle& encoder,
    const ExperimentConfig& c) {
  std::vector<std::unique_ptr<Policy>> out;
  for (const Denoiser& d : denoisers) {
    out.push_back(std::make_unique<DiffusionPolicy>(
        d, encoder, c.env.physics.push1d.u_max,
        std::string(VariantName(d.config().variant))));
  }
  return out;
}

std::vector<const Policy*> Pointers(
    const std::vector<std::unique_ptr<Policy>>& policies) {
  std::vector<const Policy*> out;
  for (const auto& p : policies) out.push_back(p.get());
  return out;
}

EvalOptions MakeEvalOptions(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  EvalOptions o;
  o.episodes_per_domain = c.eval.episodes_per_domain;
  o.env_seed = DeriveSeed(c.seed, kEvalTag);
  o.threads = ctx.threads;
  o.mode = c.eval.context_source;
  o.env = c.env.physics;
  return o;
}

std::string DomainsCsv(const std::vector<DomainSpec>& iid,
                       const std::vector<DomainSpec>& ood) {
  size_t p = 0;
  for (const auto& d : iid) p = std::max(p, d.params.size());
  std::string out = "split,domain_index";
  for (size_t j = 0; j < p; ++j) out += ",xi_" + std::to_string(j);
  out += '\n';
  auto rows = [&](const std::vector<DomainSpec>& list, const char* split) {
    for (size_t i = 0; i < list.size(); ++i) {
      out += std::string(split) + ',' + std::to_string(i);
      for (double x : list[i].params) out += ',' + Num(x);
      out += '\n';
    }
  };
  rows(iid, "iid");
  rows(ood, "ood");
  return out;
}

void PutReportMetrics(Manifest& m, const std::string& prefix,
                      const EvalReport& r) {
  m.metrics[prefix + ".iid"] = r.iid_normalized;
  m.metrics[prefix + ".iid_std"] = r.iid_normalized_std;
  m.metrics[prefix + ".ood"] = r.ood_normalized;
  m.metrics[prefix + ".ood_std"] = r.ood_normalized_std;
  m.metrics[prefix + ".mastery"] = r.mastery;
  m.metrics[prefix + ".mastery_std"] = r.mastery_std;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

std::vector<std::string> Split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

OutputFormat ParseOutputFormat(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "text") return OutputFormat::kText;
  throw ValidationError("unknown output format '" + std::string(name) +
                        "' (expected csv or text)");
}

void CmdGenData(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const fs::path& dir = ctx.dir();
  const std::vector<DomainSpec> iid = IidDomains(c);
  const std::vector<DomainSpec> ood = OodDomains(c);
  const int len = c.env.physics.episode_len(c.env.env);
  const Dataset ds =
      GenerateDataset(iid, c.env.episodes_per_domain, len,
                      DeriveSeed(c.seed, kDataTag), c.env.physics,
                      c.min_episode_len(), ctx.threads);

  fs::create_directories(dir);
  SaveDataset(ds, dir / kDatasetFile);
  if (!(LoadDataset(dir / kDatasetFile) == RoundDatasetToFloat(ds))) {
    throw IoError("dataset round trip through " +
                  (dir / kDatasetFile).string() + " does not match");
  }
  WriteTextFile(dir / "dataset.csv", DatasetToCsv(ds));
  WriteTextFile(dir / "domains.csv", DomainsCsv(iid, ood));

  Manifest m = NewManifest(c, "dataset", DataStageHash(c));
  for (const char* f : {kDatasetFile, "dataset.csv", "domains.csv"}) {
    AddFile(m, dir, f);
  }
  m.info["domains"] = std::to_string(ds.domains.size());
  m.info["episodes_per_domain"] = std::to_string(c.env.episodes_per_domain);
  m.info["episode_len"] = std::to_string(len);
  m.metrics["trajectories"] = ds.TrajectoryCount();
  WriteManifest(dir, m);

  std::ostream& out = *ctx.out;
  if (ctx.format == OutputFormat::kCsv) {
    out << "env,domains,ood_domains,episodes_per_domain,episode_len\n"
        << EnvName(c.env.env) << ',' << ds.domains.size() << ',' << ood.size()
        << ',' << c.env.episodes_per_domain << ',' << len << '\n';
  } else {
    out << EnvName(c.env.env) << " dataset: " << ds.domains.size()
        << " domains x " << c.env.episodes_per_domain << " episodes of "
        << len << " steps (" << ood.size() << " OOD domains held out)\n";
  }
}

void CmdTrainEncoder(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const fs::path& dir = ctx.dir();
  const Dataset ds = LoadRunDataset(c);
  const uint64_t seed = DeriveSeed(c.seed, kEncoderTag);
  const EncoderTrainResult res =
      TrainEncoder(ds, c.encoder.lag, c.encoder.options, seed);

  Checkpoint ckpt = EncoderToCheckpoint(res.bundle);
  ckpt.seed = c.seed;
  ckpt.config_hash = EncoderStageHash(c);
  SaveCheckpoint(ckpt, dir / kEncoderFile);

  std::string curve =
      "epoch,train_forward,train_inverse,train_total,val_forward,"
      "val_inverse,val_total\n";
  for (const EncoderEpoch& e : res.curve) {
    curve += std::to_string(e.epoch) + ',' + Num(e.train.forward) + ',' +
             Num(e.train.inverse) + ',' + Num(e.train.total) + ',' +
             Num(e.validation.forward) + ',' + Num(e.validation.inverse) +
             ',' + Num(e.validation.total) + '\n';
  }
  WriteTextFile(dir / "encoder_curve.csv", curve);

  // Same pairs the training loop validated on.
  const std::vector<ContextPair> pairs =
      BuildPairs(ds, res.split.validation, c.encoder.lag,
                 res.bundle.history, DeriveSeed(seed, 3));
  const ForwardError fe = EvaluateForward(res.bundle, ds, pairs);

  Manifest m = NewManifest(c, "encoder", EncoderStageHash(c));
  AddFile(m, dir, kEncoderFile);
  AddFile(m, dir, "encoder_curve.csv");
  AddInput(m, dir, kDatasetFile);
  m.info["lag"] = c.encoder.lag.ToString();
  m.metrics["val_forward_mse"] = fe.standardized;
  m.metrics["val_forward_mse_raw"] = fe.raw;
  double oracle = std::nan("");
  if (c.env.env == EnvId::kBallDrop) {
    oracle = BallDropOracleMse(ds, c.encoder.lag, res.bundle.history,
                               c.env.physics.balldrop, res.split.validation);
    m.metrics["oracle_forward_mse_raw"] = oracle;
  }
  WriteManifest(dir, m);

  std::ostream& out = *ctx.out;
  if (ctx.format == OutputFormat::kCsv) {
    out << "lag,epochs,val_forward_mse,val_forward_mse_raw,"
           "oracle_forward_mse_raw\n"
        << c.encoder.lag.ToString() << ',' << res.curve.size() << ','
        << Num(fe.standardized) << ',' << Num(fe.raw) << ',' << Num(oracle)
        << '\n';
  } else {
    out << "encoder (lag " << c.encoder.lag.ToString() << ", "
        << res.curve.size() << " epochs): validation forward MSE "
        << Num(fe.standardized) << " standardized, " << Num(fe.raw) << " raw";
    if (!std::isnan(oracle)) out << " (oracle " << Num(oracle) << " raw)";
    out << '\n';
  }
}

void CmdProbe(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const fs::path& dir = ctx.dir();
  const Dataset ds = LoadRunDataset(c);
  std::vector<LagRule> lags = c.encoder.probe_lags;
  if (lags.empty()) lags.push_back(c.encoder.lag);

  struct Row {
    double accuracy = 0.0;
    double reconstruction = 0.0;
    EmbeddingStats stats;
    double forward = 0.0;
    std::string embeddings;
  };
  std::vector<Row> rows(lags.size());
  const uint64_t seed = DeriveSeed(c.seed, kEncoderTag);
  ParallelFor(static_cast<int>(lags.size()), ctx.threads, [&](int i) {
    const EncoderTrainResult res =
        TrainEncoder(ds, lags[i], c.encoder.options, seed);
    const EmbeddingSet emb = EmbedEpisodes(res.bundle, ds, res.split.validation,
                                           c.encoder.probe_stride);
    Row& r = rows[i];
    r.accuracy =
        LinearProbe(emb.z, emb.domain, DeriveSeed(c.seed, kProbeClassifierTag, i));
    r.reconstruction = ReconstructParams(
        emb.z, emb.params, emb.domain, DeriveSeed(c.seed, kProbeRegressorTag, i));
    r.stats = ComputeEmbeddingStats(emb.z, emb.domain);
    const std::vector<ContextPair> pairs =
        BuildPairs(ds, res.split.validation, lags[i], res.bundle.history,
                   DeriveSeed(seed, 3));
    r.forward = EvaluateForward(res.bundle, ds, pairs).standardized;
    r.embeddings = EmbeddingsToCsv(emb);
  });

  Manifest m = NewManifest(c, "probe", EncoderStageHash(c));
  std::string csv =
      "lag,linear_probe_accuracy,reconstruction_mse,intra,inter,ratio,"
      "val_forward_mse\n";
  std::vector<std::string> names;
  for (size_t i = 0; i < lags.size(); ++i) {
    const Row& r = rows[i];
    const std::string lag = lags[i].ToString();
    names.push_back(lag);
    csv += lag + ',' + Num(r.accuracy) + ',' + Num(r.reconstruction) + ',' +
           Num(r.stats.intra) + ',' + Num(r.stats.inter) + ',' +
           Num(r.stats.ratio) + ',' + Num(r.forward) + '\n';
    const std::string file = "embeddings_lag_" + lag + ".csv";
    WriteTextFile(dir / file, r.embeddings);
    AddFile(m, dir, file);
    m.metrics[lag + ".accuracy"] = r.accuracy;
    m.metrics[lag + ".reconstruction_mse"] = r.reconstruction;
    m.metrics[lag + ".ratio"] = r.stats.ratio;
    m.metrics[lag + ".val_forward_mse"] = r.forward;
  }
  WriteTextFile(dir / "probe.csv", csv);
  AddFile(m, dir, "probe.csv");
  AddInput(m, dir, kDatasetFile);
  m.info["lags"] = Join(names);
  WriteManifest(dir, m);

  std::ostream& out = *ctx.out;
  if (ctx.format == OutputFormat::kCsv) {
    out << csv;
    return;
  }
  out << Pad("lag", 6) << Pad("probe_acc", 11) << Pad("recon_mse", 11)
      << Pad("intra/inter", 13) << "fwd_mse\n";
  for (size_t i = 0; i < lags.size(); ++i) {
    out << Pad(names[i], 6) << Pad(Fixed(rows[i].accuracy), 11)
        << Pad(Fixed(rows[i].reconstruction), 11)
        << Pad(Fixed(rows[i].stats.ratio), 13) << Num(rows[i].forward)
        << '\n';
  }
}

void CmdTrainPolicy(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  RequirePush1D(c, "train-policy");
  const fs::path& dir = ctx.dir();
  const Dataset ds = LoadRunDataset(c);
  const EncoderBundle encoder = LoadRunEncoder(c);
  const uint64_t encoder_hash =
      Fnv1a64(std::span<const char>(ReadFileBytes(dir / kEncoderFile)));

  struct Job {
    Variant variant;
    uint64_t seed;
    PolicyTrainResult result;
  };
  std::vector<Job> jobs;
  for (Variant v : c.policy.variants) {
    for (uint64_t s : c.eval.seeds) jobs.push_back({v, s, {}});
  }
  ParallelFor(static_cast<int>(jobs.size()), ctx.threads, [&](int i) {
    PolicyConfig cfg = c.policy.config;
    cfg.variant = jobs[i].variant;
    jobs[i].result = TrainPolicy(ds, encoder, cfg, c.policy.train,
                                 DeriveSeed(c.seed, kPolicyTag, jobs[i].seed));
  });

  Manifest m = NewManifest(c, "policy", PolicyStageHash(c));
  std::string summary = "variant,seed,final_loss\n";
  for (const Job& j : jobs) {
    const std::string stem = PolicyStem(j.variant, j.seed);
    Checkpoint ckpt = PolicyToCheckpoint(j.result.denoiser, encoder_hash);
    ckpt.seed = c.seed;
    ckpt.config_hash = PolicyStageHash(c);
    SaveCheckpoint(ckpt, dir / (stem + ".ckpt"));
    std::string loss = "iteration,loss\n";
    for (const auto& [it, v] : j.result.loss_curve) {
      loss += std::to_string(it) + ',' + Num(v) + '\n';
    }
    WriteTextFile(dir / (stem + "_loss.csv"), loss);
    AddFile(m, dir, stem + ".ckpt");
    AddFile(m, dir, stem + "_loss.csv");
    const double final_loss = j.result.loss_curve.empty()
                                  ? std::nan("")
                                  : j.result.loss_curve.back().second;
    m.metrics[std::string(VariantName(j.variant)) + ".seed" +
              std::to_string(j.seed) + ".final_loss"] = final_loss;
    summary += std::string(VariantName(j.variant)) + ',' +
               std::to_string(j.seed) + ',' + Num(final_loss) + '\n';
  }
  AddInput(m, dir, kDatasetFile);
  AddInput(m, dir, kEncoderFile);
  WriteManifest(dir, m);

  std::ostream& out = *ctx.out;
  if (ctx.format == OutputFormat::kCsv) {
    out << summary;
  } else {
    out << "trained " << jobs.size() << " policies ("
        << c.policy.variants.size() << " variants x " << c.eval.seeds.size()
        << " seeds)\n";
  }
}

void CmdEval(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  RequirePush1D(c, "eval");
  const fs::path& dir = ctx.dir();
  RequireUpstream(dir, "policy", PolicyStageHash(c));
  const EncoderBundle encoder = LoadRunEncoder(c);
  const std::vector<DomainSpec> iid = IidDomains(c);
  const std::vector<DomainSpec> ood = OodDomains(c);
  const EvalOptions options = MakeEvalOptions(ctx);

  Manifest m = NewManifest(c, "eval", ConfigHash(c));
  std::vector<std::string> names;
  std::string text;
  std::string csv = "variant,iid,iid_std,ood,ood_std,mastery,mastery_std\n";
  for (Variant v : c.policy.variants) {
    const std::string name(VariantName(v));
    names.push_back(name);
    Log(ctx, "eval: " + name);
    const auto policies = MakePolicies(LoadRunPolicies(c, v), encoder, c);
    const std::vector<const Policy*> ptrs = Pointers(policies);
    for (uint64_t s : c.eval.seeds) AddInput(m, dir, PolicyStem(v, s) + ".ckpt");

    EvalReport report;
    if (c.eval.compare_contexts) {
      const ContextComparison cmp =
          CompareContextSources(ptrs, iid, ood, options);
      switch (options.mode) {
        case ContextMode::kColdStart: report = cmp.cold_start; break;
        case ContextMode::kPersistent: report = cmp.persistent; break;
        case ContextMode::kWarmStart: report = cmp.warm_start; break;
      }
      const std::string file = "contexts_" + name + ".csv";
      WriteTextFile(dir / file, ContextComparisonToCsv(cmp));
      AddFile(m, dir, file);
      PutReportMetrics(m, name + ".cold_start", cmp.cold_start);
      PutReportMetrics(m, name + ".persistent", cmp.persistent);
      PutReportMetrics(m, name + ".warm_start", cmp.warm_start);
      m.metrics[name + ".context_spread"] = cmp.iid_spread();
    } else if (options.mode == ContextMode::kColdStart) {
      report = Evaluate(ptrs, iid, ood, options);
    } else {
      // Buffers come from the policy's own cold-start episodes.
      EvalOptions cold = options;
      cold.mode = ContextMode::kColdStart;
      BufferTable buffers;
      Evaluate(ptrs, iid, ood, cold, nullptr, &buffers);
      report = Evaluate(ptrs, iid, ood, options, &buffers);
    }
    WriteTextFile(dir / ("eval_" + name + ".csv"), EvalReportToCsv(report));
    WriteTextFile(dir / ("eval_" + name + ".txt"), EvalReportToText(report));
    AddFile(m, dir, "eval_" + name + ".csv");
    AddFile(m, dir, "eval_" + name + ".txt");
    PutReportMetrics(m, name, report);
    csv += name + ',' + Num(report.iid_normalized) + ',' +
           Num(report.iid_normalized_std) + ',' + Num(report.ood_normalized) +
           ',' + Num(report.ood_normalized_std) + ',' + Num(report.mastery) +
           ',' + Num(report.mastery_std) + '\n';
    text += "[" + name + "]\n" + EvalReportToText(report);
  }
  AddInput(m, dir, kEncoderFile);
  m.info["variants"] = Join(names);
  m.info["context_source"] = std::string(ContextModeName(options.mode));
  m.info["seeds"] = std::to_string(c.eval.seeds.size());
  m.info["compare_contexts"] = c.eval.compare_contexts ? "1" : "0";
  WriteManifest(dir, m);
  *ctx.out << (ctx.format == OutputFormat::kCsv ? csv : text);
}

void CmdSweep(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  RequirePush1D(c, "sweep");
  const fs::path& dir = ctx.dir();
  const std::vector<Variant>& vs = c.policy.variants;
  const Variant variant =
      std::find(vs.begin(), vs.end(), Variant::kFull) != vs.end()
          ? Variant::kFull
          : vs.front();
  const EncoderBundle encoder = LoadRunEncoder(c);
  Manifest m = NewManifest(c, "sweep", ConfigHash(c));

  PolicyFactory factory;
  std::vector<Denoiser> trained;
  Dataset ds;
  if (c.eval.sweep_mode == SweepMode::kSampling) {
    RequireUpstream(dir, "policy", PolicyStageHash(c));
    trained = LoadRunPolicies(c, variant);
    for (uint64_t s : c.eval.seeds) {
      AddInput(m, dir, PolicyStem(variant, s) + ".ckpt");
    }
    factory = [&](double lambda) {
      std::vector<Denoiser> ds_lambda = trained;
      for (Denoiser& d : ds_lambda) d.config().lambda = lambda;
      return MakePolicies(ds_lambda, encoder, c);
    };
  } else {
    ds = LoadRunDataset(c);
    AddInput(m, dir, kDatasetFile);
    factory = [&](double lambda) {
      std::vector<Denoiser> out(c.eval.seeds.size());
      PolicyConfig cfg = c.policy.config;
      cfg.variant = variant;
      cfg.lambda = lambda;
      Log(ctx, "sweep: retraining at lambda " + Num(lambda));
      ParallelFor(static_cast<int>(out.size()), ctx.threads, [&](int i) {
        out[i] = TrainPolicy(ds, encoder, cfg, c.policy.train,
                             DeriveSeed(c.seed, kPolicyTag, c.eval.seeds[i]))
                     .denoiser;
      });
      return MakePolicies(out, encoder, c);
    };
  }
  AddInput(m, dir, kEncoderFile);

  const SweepResult sweep =
      SweepGuidance(factory, c.eval.sweep_lambdas, IidDomains(c),
                    OodDomains(c), MakeEvalOptions(ctx));
  for (const std::string& w : sweep.warnings) Log(ctx, "warning: " + w);
  const std::string csv = SweepToCsv(sweep);
  WriteTextFile(dir / "sweep.csv", csv);
  AddFile(m, dir, "sweep.csv");
  m.info["variant"] = std::string(VariantName(variant));
  m.info["mode"] = SweepModeName(c.eval.sweep_mode);
  m.info["rows"] = std::to_string(sweep.rows.size());
  m.info["seeds"] = std::to_string(c.eval.seeds.size());
  for (size_t i = 0; i < sweep.rows.size(); ++i) {
    const std::string key = std::to_string(i);
    m.metrics[key + ".lambda"] = sweep.rows[i].lambda;
    PutReportMetrics(m, key, sweep.rows[i].report);
  }
  WriteManifest(dir, m);

  std::ostream& out = *ctx.out;
  if (ctx.format == OutputFormat::kCsv) {
    out << csv;
    return;
  }
  out << "guidance sweep (" << VariantName(variant) << ", "
      << SweepModeName(c.eval.sweep_mode) << ")\n"
      << Pad("lambda", 9) << Pad("IID", 9) << Pad("OOD", 9) << "Mastery\n";
  for (const SweepRow& row : sweep.rows) {
    out << Pad(Num(row.lambda), 9) << Pad(Fixed(row.report.iid_normalized), 9)
        << Pad(Fixed(row.report.ood_normalized), 9)
        << Fixed(row.report.mastery) << '\n';
  }
}

namespace {

const Manifest* FindKind(const std::vector<Manifest>& all,
                         const std::string& kind) {
  for (const Manifest& m : all) {
    if (m.kind == kind) return &m;
  }
  return nullptr;
}

double Metric(const Manifest& m, const std::string& key) {
  const auto it = m.metrics.find(key);
  if (it == m.metrics.end()) {
    throw LineageError(m.name + " manifest lacks metric '" + key + "'");
  }
  return it->second;
}

std::string Info(const Manifest& m, const std::string& key) {
  const auto it = m.info.find(key);
  if (it == m.info.end()) {
    throw LineageError(m.name + " manifest lacks field '" + key + "'");
  }
  return it->second;
}

// Rows of (label, values) for one table; values follow `columns`.
struct Table {
  std::string name;
  std::string title;
  std::string key_column;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  bool paired = false;  // columns come in (mean, std) pairs
};

Table ScoreTable(const std::string& name, const std::string& title,
                 const std::string& key_column, const Manifest& m,
                 const std::vector<std::pair<std::string, std::string>>& rows) {
  Table t{name, title, key_column,
          {"iid", "iid_std", "ood", "ood_std", "mastery", "mastery_std"},
          {}, true};
  for (const auto& [label, prefix] : rows) {
    std::vector<double> v;
    for (const std::string& col : t.columns) v.push_back(Metric(m, prefix + "." + col));
    t.rows.emplace_back(label, std::move(v));
  }
  return t;
}

size_t Width(const std::string& column) {
  return std::max<size_t>(14, column.size() + 2);
}

std::string TableText(const Table& t) {
  std::string out = t.title + '\n';
  const size_t key_width = std::max<size_t>(18, t.key_column.size() + 2);
  out += Pad(t.key_column, key_width);
  if (t.paired) {
    out += Pad("IID", 17) + Pad("OOD", 17) + "Mastery\n";
  } else {
    for (const std::string& col : t.columns) out += Pad(col, Width(col));
    out += '\n';
  }
  for (const auto& [label, v] : t.rows) {
    out += Pad(label, key_width);
    if (t.paired) {
      for (size_t j = 0; j < v.size(); j += 2) {
        const std::string cell = Fixed(v[j]) + " +/- " + Fixed(v[j + 1]);
        out += j + 2 < v.size() ? Pad(cell, 17) : cell;
      }
    } else {
      for (size_t j = 0; j < v.size(); ++j) {
        out += Pad(Fixed(v[j]), Width(t.columns[j]));
      }
    }
    out += '\n';
  }
  return out;
}

void CheckInputs(const fs::path& dir, const Manifest& m) {
  for (const auto& [file, hash] : m.inputs) {
    if (!fs::exists(dir / file)) {
      throw LineageError(m.name + ": input " + file + " is missing");
    }
    if (FileHashHex(dir / file) != hash) {
      throw LineageError(m.name + ": input " + file +
                         " changed after it was consumed");
    }
  }
}

}  // namespace

void CmdReport(const fs::path& dir, OutputFormat format, std::ostream& out) {
  const std::vector<Manifest> all = ReadAllManifests(dir);
  if (all.empty()) {
    throw LineageError("no artifacts in " + dir.string());
  }
  for (const Manifest& m : all) {
    VerifyFiles(dir, m);
    CheckInputs(dir, m);
    if (m.seed != all.front().seed) {
      throw LineageError("artifacts from different master seeds: " +
                         all.front().name + " (" +
                         std::to_string(all.front().seed) + ") and " + m.name +
                         " (" + std::to_string(m.seed) + ")");
    }
  }
  const Manifest* anchor = nullptr;
  for (const Manifest& m : all) {
    if (m.kind != "eval" && m.kind != "sweep" && m.kind != "probe") continue;
    if (anchor && anchor->config_hash != m.config_hash) {
      throw LineageError("conflicting configuration hashes: " + anchor->name +
                         " " + HashToHex(anchor->config_hash) + " vs " +
                         m.name + " " + HashToHex(m.config_hash));
    }
    if (!anchor) anchor = &m;
  }

  std::vector<Table> tables;
  if (const Manifest* m = FindKind(all, "eval")) {
    std::vector<std::pair<std::string, std::string>> rows;
    const std::vector<std::string> variants = Split(Info(*m, "variants"));
    for (const std::string& v : variants) rows.emplace_back(v, v);
    tables.push_back(ScoreTable(
        "ablation",
        "Ablation: normalized return over " + Info(*m, "seeds") +
            " seeds (" + Info(*m, "context_source") + " context)",
        "variant", *m, rows));
    if (Info(*m, "compare_contexts") == "1") {
      for (const std::string& v : variants) {
        std::vector<std::pair<std::string, std::string>> modes;
        for (const char* mode : {"cold_start", "persistent", "warm_start"}) {
          modes.emplace_back(mode, v + "." + mode);
        }
        tables.push_back(ScoreTable(
            "contexts_" + v,
            "Context sources (" + v + "): IID spread " +
                Fixed(Metric(*m, v + ".context_spread")),
            "source", *m, modes));
      }
    }
  }
  if (const Manifest* m = FindKind(all, "sweep")) {
    std::vector<std::pair<std::string, std::string>> rows;
    const int n = std::stoi(Info(*m, "rows"));
    for (int i = 0; i < n; ++i) {
      rows.emplace_back(Num(Metric(*m, std::to_string(i) + ".lambda")),
                        std::to_string(i));
    }
    tables.push_back(ScoreTable("sweep",
                                "Guidance sweep (" + Info(*m, "variant") +
                                    ", " + Info(*m, "mode") + ")",
                                "lambda", *m, rows));
  }
  if (const Manifest* m = FindKind(all, "probe")) {
    Table t{"probe", "Context probes", "lag",
            {"accuracy", "reconstruction_mse", "ratio", "val_forward_mse"},
            {}, false};
    for (const std::string& lag : Split(Info(*m, "lags"))) {
      std::vector<double> v;
      for (const std::string& col : t.columns) v.push_back(Metric(*m, lag + "." + col));
      t.rows.emplace_back(lag, std::move(v));
    }
    tables.push_back(t);
  }

  if (format == OutputFormat::kCsv) {
    out << "table,row,column,value\n";
    for (const Manifest& m : all) {
      out << "artifacts," << m.name << ",stage_hash," << HashToHex(m.stage_hash)
          << '\n';
    }
    for (const Table& t : tables) {
      for (const auto& [label, v] : t.rows) {
        for (size_t j = 0; j < v.size(); ++j) {
          out << t.name << ',' << label << ',' << t.columns[j] << ','
              << Num(v[j]) << '\n';
        }
      }
    }
    return;
  }
  out << "master seed " << all.front().seed;
  if (anchor) out << ", config " << HashToHex(anchor->config_hash);
  out << "\nartifacts:";
  for (const Manifest& m : all) out << ' ' << m.name;
  out << '\n';
  for (const Table& t : tables) out << '\n' << TableText(t);
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const LineageError*>(&e)) return 3;
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  return 1;
}

}  // namespace dadp
