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

#include "dadp/cli/config.h"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <yaml-cpp/yaml.h>

#include "dadp/errors.h"
#include "dadp/nnmath/binary_io.h"
#include "dadp/nnmath/hash.h"

namespace dadp {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Node& node, const std::string& msg) const {
    const int line = node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
    throw ValidationError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  void ExpectMap(const YAML::Node& node, const std::string& block) const {
    if (!node.IsMap()) Fail(node, "'" + block + "' must be a mapping");
  }

  void CheckKeys(const YAML::Node& map, std::initializer_list<const char*> keys,
                 const std::string& block) const {
    ExpectMap(map, block);
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = map.begin(); it != map.end(); ++it) {
      const std::string key = it->first.as<std::string>();
      if (!allowed.contains(key)) {
        Fail(it->first, "unknown key '" + key + "' in " + block);
      }
    }
  }

  template <typename T>
  T Scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) Fail(node, what + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(node, "cannot read " + what + " from '" + node.Scalar() + "'");
    }
  }

  double Real(const YAML::Node& node, const std::string& what) const {
    const double v = Scalar<double>(node, what);
    if (!std::isfinite(v)) Fail(node, what + " must be finite");
    return v;
  }

  double Positive(const YAML::Node& node, const std::string& what) const {
    const double v = Real(node, what);
    if (!(v > 0.0)) Fail(node, what + " must be positive");
    return v;
  }

  double NonNegative(const YAML::Node& node, const std::string& what) const {
    const double v = Real(node, what);
    if (v < 0.0) Fail(node, what + " must be non-negative");
    return v;
  }

  int Int(const YAML::Node& node, const std::string& what, int min) const {
    const int v = Scalar<int>(node, what);
    if (v < min) Fail(node, what + " must be at least " + std::to_string(min));
    return v;
  }

  bool Bool(const YAML::Node& node, const std::string& what) const {
    return Scalar<bool>(node, what);
  }

  Interval Range(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() != 2) {
      Fail(node, what + " must be a two-element list [lo, hi]");
    }
    Interval iv{Real(node[0], what), Real(node[1], what)};
    if (iv.lo > iv.hi) Fail(node, what + " has lo > hi");
    return iv;
  }

  std::vector<int> Widths(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() == 0) {
      Fail(node, what + " must be a non-empty list");
    }
    std::vector<int> out;
    for (const auto& n : node) out.push_back(Int(n, what, 1));
    return out;
  }

  // Reads a string and converts it with `parse`, reporting its errors at
  // the node's line.
  template <typename Parse>
  auto Named(const YAML::Node& node, const std::string& what,
             Parse parse) const {
    const std::string text = Scalar<std::string>(node, what);
    try {
      return parse(text);
    } catch (const ValidationError& e) {
      Fail(node, e.what());
    }
  }

  LagRule Lag(const YAML::Node& node, const std::string& what) const {
    return Named(node, what, LagRule::Parse);
  }

 private:
  std::string source_;
};

void ReadBallDrop(const Reader& r, const YAML::Node& n, BallDropConfig& c) {
  r.CheckKeys(n, {"t0", "gravity", "y0", "v0"}, "env.balldrop");
  if (n["t0"]) c.t0 = r.Positive(n["t0"], "env.balldrop.t0");
  if (n["gravity"]) c.gravity = r.Range(n["gravity"], "env.balldrop.gravity");
  if (n["y0"]) c.y0 = r.Range(n["y0"], "env.balldrop.y0");
  if (n["v0"]) c.v0 = r.Range(n["v0"], "env.balldrop.v0");
}

void ReadPush1D(const Reader& r, const YAML::Node& n, Push1DConfig& c) {
  r.CheckKeys(n, {"dt", "x_target", "u_max", "kp", "kd", "mass", "damping",
                  "x0", "v0"},
              "env.push1d");
  if (n["dt"]) c.dt = r.Positive(n["dt"], "env.push1d.dt");
  if (n["x_target"]) c.x_target = r.Real(n["x_target"], "env.push1d.x_target");
  if (n["u_max"]) c.u_max = r.Positive(n["u_max"], "env.push1d.u_max");
  if (n["kp"]) c.kp = r.NonNegative(n["kp"], "env.push1d.kp");
  if (n["kd"]) c.kd = r.NonNegative(n["kd"], "env.push1d.kd");
  if (n["mass"]) {
    c.mass = r.Range(n["mass"], "env.push1d.mass");
    if (!(c.mass.lo > 0.0)) r.Fail(n["mass"], "env.push1d.mass must be positive");
  }
  if (n["damping"]) {
    c.damping = r.Range(n["damping"], "env.push1d.damping");
    if (c.damping.lo < 0.0) {
      r.Fail(n["damping"], "env.push1d.damping must be non-negative");
    }
  }
  if (n["x0"]) c.x0 = r.Range(n["x0"], "env.push1d.x0");
  if (n["v0"]) c.v0 = r.Range(n["v0"], "env.push1d.v0");
}

void ReadEnv(const Reader& r, const YAML::Node& n, EnvBlock& b) {
  r.CheckKeys(n, {"name", "grid_size", "ood_count", "episodes_per_domain",
                  "episode_len", "balldrop", "push1d"},
              "env");
  if (n["name"]) {
    b.env = r.Named(n["name"], "env.name",
                    [](const std::string& t) { return ParseEnvId(t); });
  }
  if (n["grid_size"]) b.grid_size = r.Int(n["grid_size"], "env.grid_size", 2);
  if (n["ood_count"]) b.ood_count = r.Int(n["ood_count"], "env.ood_count", 0);
  if (n["episodes_per_domain"]) {
    b.episodes_per_domain =
        r.Int(n["episodes_per_domain"], "env.episodes_per_domain", 2);
  }
  if (n["balldrop"]) ReadBallDrop(r, n["balldrop"], b.physics.balldrop);
  if (n["push1d"]) ReadPush1D(r, n["push1d"], b.physics.push1d);
  if (n["episode_len"]) {
    const int len = r.Int(n["episode_len"], "env.episode_len", 1);
    if (b.env == EnvId::kBallDrop) {
      b.physics.balldrop.episode_len = len;
    } else {
      b.physics.push1d.episode_len = len;
    }
  }
}

void ReadEncoder(const Reader& r, const YAML::Node& n, EncoderBlock& b) {
  r.CheckKeys(n, {"lag", "history", "encoder_hidden", "head_hidden",
                  "beta_forward", "beta_inverse", "epochs", "batch_size",
                  "learning_rate", "cosine_decay", "train_ratio", "probe_lags",
                  "probe_stride"},
              "encoder");
  EncoderOptions& o = b.options;
  if (n["lag"]) b.lag = r.Lag(n["lag"], "encoder.lag");
  if (n["history"]) o.history = r.Int(n["history"], "encoder.history", 1);
  if (n["encoder_hidden"]) {
    o.encoder_hidden = r.Widths(n["encoder_hidden"], "encoder.encoder_hidden");
  }
  if (n["head_hidden"]) {
    o.head_hidden = r.Widths(n["head_hidden"], "encoder.head_hidden");
  }
  if (n["beta_forward"]) {
    o.beta_forward = r.NonNegative(n["beta_forward"], "encoder.beta_forward");
  }
  if (n["beta_inverse"]) {
    o.beta_inverse = r.NonNegative(n["beta_inverse"], "encoder.beta_inverse");
  }
  if (n["epochs"]) o.epochs = r.Int(n["epochs"], "encoder.epochs", 0);
  if (n["batch_size"]) o.batch_size = r.Int(n["batch_size"], "encoder.batch_size", 1);
  if (n["learning_rate"]) {
    o.learning_rate = r.Positive(n["learning_rate"], "encoder.learning_rate");
  }
  if (n["cosine_decay"]) o.cosine_decay = r.Bool(n["cosine_decay"], "encoder.cosine_decay");
  if (n["train_ratio"]) {
    o.train_ratio = r.Real(n["train_ratio"], "encoder.train_ratio");
    if (!(o.train_ratio > 0.0 && o.train_ratio < 1.0)) {
      r.Fail(n["train_ratio"], "encoder.train_ratio must lie in (0, 1)");
    }
  }
  if (n["probe_lags"]) {
    const YAML::Node& l = n["probe_lags"];
    if (!l.IsSequence()) r.Fail(l, "encoder.probe_lags must be a list");
    b.probe_lags.clear();
    for (const auto& e : l) b.probe_lags.push_back(r.Lag(e, "encoder.probe_lags"));
  }
  if (n["probe_stride"]) {
    b.probe_stride = r.Int(n["probe_stride"], "encoder.probe_stride", 1);
  }
}

void ReadPolicy(const Reader& r, const YAML::Node& n, PolicyBlock& b) {
  r.CheckKeys(n, {"variants", "lambda", "steps", "future", "iterations",
                  "batch_size", "learning_rate", "cosine_decay", "hidden"},
              "policy");
  if (n["variants"]) {
    const YAML::Node& v = n["variants"];
    if (!v.IsSequence() || v.size() == 0) {
      r.Fail(v, "policy.variants must be a non-empty list");
    }
    b.variants.clear();
    for (const auto& e : v) {
      // An unquoted `null` reaches us as a YAML null.
      const Variant var =
          e.IsNull() ? Variant::kNull
                     : r.Named(e, "policy.variants", [](const std::string& t) {
                         return ParseVariant(t);
                       });
      for (Variant seen : b.variants) {
        if (seen == var) r.Fail(e, "duplicate variant in policy.variants");
      }
      b.variants.push_back(var);
    }
  }
  if (n["lambda"]) b.config.lambda = r.NonNegative(n["lambda"], "policy.lambda");
  if (n["steps"]) b.config.steps = r.Int(n["steps"], "policy.steps", 1);
  if (n["future"]) b.config.future = r.Int(n["future"], "policy.future", 1);
  if (n["iterations"]) {
    b.train.iterations = r.Int(n["iterations"], "policy.iterations", 1);
  }
  if (n["batch_size"]) {
    b.train.batch_size = r.Int(n["batch_size"], "policy.batch_size", 1);
  }
  if (n["learning_rate"]) {
    b.train.learning_rate = r.Positive(n["learning_rate"], "policy.learning_rate");
  }
  if (n["cosine_decay"]) {
    b.train.cosine_decay = r.Bool(n["cosine_decay"], "policy.cosine_decay");
  }
  if (n["hidden"]) b.train.hidden = r.Widths(n["hidden"], "policy.hidden");
  b.train.log_every = std::max(1, b.train.iterations / 100);
}

void ReadEval(const Reader& r, const YAML::Node& n, EvalBlock& b) {
  r.CheckKeys(n, {"episodes_per_domain", "seeds", "context_source",
                  "compare_contexts", "sweep_lambdas", "sweep_mode"},
              "eval");
  if (n["episodes_per_domain"]) {
    b.episodes_per_domain =
        r.Int(n["episodes_per_domain"], "eval.episodes_per_domain", 1);
  }
  if (n["seeds"]) {
    const YAML::Node& s = n["seeds"];
    if (!s.IsSequence() || s.size() == 0) {
      r.Fail(s, "eval.seeds must be a non-empty list");
    }
    b.seeds.clear();
    for (const auto& e : s) {
      const uint64_t v = r.Scalar<uint64_t>(e, "eval.seeds");
      for (uint64_t seen : b.seeds) {
        if (seen == v) r.Fail(e, "duplicate seed in eval.seeds");
      }
      b.seeds.push_back(v);
    }
  }
  if (n["context_source"]) {
    b.context_source =
        r.Named(n["context_source"], "eval.context_source",
                [](const std::string& t) { return ParseContextMode(t); });
  }
  if (n["compare_contexts"]) {
    b.compare_contexts = r.Bool(n["compare_contexts"], "eval.compare_contexts");
  }
  if (n["sweep_lambdas"]) {
    const YAML::Node& l = n["sweep_lambdas"];
    if (!l.IsSequence()) r.Fail(l, "eval.sweep_lambdas must be a list");
    b.sweep_lambdas.clear();
    for (const auto& e : l) {
      b.sweep_lambdas.push_back(r.NonNegative(e, "eval.sweep_lambdas"));
    }
  }
  if (n["sweep_mode"]) {
    const std::string m = r.Scalar<std::string>(n["sweep_mode"], "eval.sweep_mode");
    if (m == "sampling") {
      b.sweep_mode = SweepMode::kSampling;
    } else if (m == "retrain") {
      b.sweep_mode = SweepMode::kRetrain;
    } else {
      r.Fail(n["sweep_mode"], "eval.sweep_mode must be 'sampling' or 'retrain'");
    }
  }
}

std::string G(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string G(const Interval& iv) { return "[" + G(iv.lo) + "," + G(iv.hi) + "]"; }

template <typename T>
std::string List(const std::vector<T>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += G(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out + "]";
}

std::string EnvLines(const ExperimentConfig& c) {
  const EnvBlock& e = c.env;
  const BallDropConfig& b = e.physics.balldrop;
  const Push1DConfig& p = e.physics.push1d;
  std::ostringstream os;
  os << "seed=" << c.seed << '\n'
     << "env.name=" << EnvName(e.env) << '\n'
     << "env.grid_size=" << e.grid_size << '\n'
     << "env.ood_count=" << e.ood_count << '\n'
     << "env.episodes_per_domain=" << e.episodes_per_domain << '\n'
     << "env.balldrop=" << G(b.t0) << ';' << G(b.gravity) << ';' << G(b.y0)
     << ';' << G(b.v0) << ';' << b.episode_len << '\n'
     << "env.push1d=" << G(p.dt) << ';' << G(p.x_target) << ';' << G(p.u_max)
     << ';' << G(p.kp) << ';' << G(p.kd) << ';' << G(p.mass) << ';'
     << G(p.damping) << ';' << G(p.x0) << ';' << G(p.v0) << ';'
     << p.episode_len << '\n';
  return os.str();
}

std::string EncoderLines(const ExperimentConfig& c) {
  const EncoderOptions& o = c.encoder.options;
  std::ostringstream os;
  os << "encoder.lag=" << c.encoder.lag.ToString() << '\n'
     << "encoder.history=" << o.history << '\n'
     << "encoder.encoder_hidden=" << List(o.encoder_hidden) << '\n'
     << "encoder.head_hidden=" << List(o.head_hidden) << '\n'
     << "encoder.beta=" << G(o.beta_forward) << ';' << G(o.beta_inverse) << '\n'
     << "encoder.epochs=" << o.epochs << '\n'
     << "encoder.batch_size=" << o.batch_size << '\n'
     << "encoder.learning_rate=" << G(o.learning_rate) << '\n'
     << "encoder.cosine_decay=" << o.cosine_decay << '\n'
     << "encoder.train_ratio=" << G(o.train_ratio) << '\n';
  return os.str();
}

std::string PolicyLines(const ExperimentConfig& c) {
  const PolicyBlock& p = c.policy;
  std::string variants = "[";
  for (size_t i = 0; i < p.variants.size(); ++i) {
    variants += (i ? "," : "") + std::string(VariantName(p.variants[i]));
  }
  variants += "]";
  std::ostringstream os;
  os << "policy.variants=" << variants << '\n'
     << "policy.lambda=" << G(p.config.lambda) << '\n'
     << "policy.steps=" << p.config.steps << '\n'
     << "policy.future=" << p.config.future << '\n'
     << "policy.iterations=" << p.train.iterations << '\n'
     << "policy.batch_size=" << p.train.batch_size << '\n'
     << "policy.learning_rate=" << G(p.train.learning_rate) << '\n'
     << "policy.cosine_decay=" << p.train.cosine_decay << '\n'
     << "policy.hidden=" << List(p.train.hidden) << '\n'
     // One policy is trained per evaluation seed.
     << "eval.seeds=" << List(c.eval.seeds) << '\n';
  return os.str();
}

std::string EvalLines(const ExperimentConfig& c) {
  const EvalBlock& e = c.eval;
  std::vector<std::string> lags;
  for (const auto& l : c.encoder.probe_lags) lags.push_back(l.ToString());
  std::string probe = "[";
  for (size_t i = 0; i < lags.size(); ++i) probe += (i ? "," : "") + lags[i];
  probe += "]";
  std::ostringstream os;
  os << "eval.episodes_per_domain=" << e.episodes_per_domain << '\n'
     << "eval.context_source=" << ContextModeName(e.context_source) << '\n'
     << "eval.compare_contexts=" << e.compare_contexts << '\n'
     << "eval.sweep_lambdas=" << List(e.sweep_lambdas) << '\n'
     << "eval.sweep_mode=" << SweepModeName(e.sweep_mode) << '\n'
     << "encoder.probe_lags=" << probe << '\n'
     << "encoder.probe_stride=" << c.encoder.probe_stride << '\n';
  return os.str();
}

}  // namespace

std::string SweepModeName(SweepMode mode) {
  return mode == SweepMode::kSampling ? "sampling" : "retrain";
}

ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError(source + ":" + std::to_string(e.mark.line + 1) +
                          ": " + e.msg);
  }
  const Reader r(source);
  ExperimentConfig c;
  if (root.IsNull()) return c;
  r.CheckKeys(root, {"seed", "output_dir", "env", "encoder", "policy", "eval"},
              "the top level");
  if (root["seed"]) c.seed = r.Scalar<uint64_t>(root["seed"], "seed");
  if (root["output_dir"]) {
    c.output_dir = r.Scalar<std::string>(root["output_dir"], "output_dir");
  }
  if (root["env"]) ReadEnv(r, root["env"], c.env);
  if (root["encoder"]) ReadEncoder(r, root["encoder"], c.encoder);
  if (root["policy"]) ReadPolicy(r, root["policy"], c.policy);
  if (root["eval"]) ReadEval(r, root["eval"], c.eval);
  try {
    ValidateConfig(c);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  const std::vector<char> bytes = ReadFileBytes(path);
  return ParseConfig(std::string(bytes.begin(), bytes.end()), path.string());
}

void ValidateConfig(const ExperimentConfig& c) {
  const EnvBlock& e = c.env;
  const BallDropConfig& b = e.physics.balldrop;
  const Push1DConfig& p = e.physics.push1d;
  const std::pair<const char*, Interval> ranges[] = {
      {"env.balldrop.gravity", b.gravity}, {"env.balldrop.y0", b.y0},
      {"env.balldrop.v0", b.v0},           {"env.push1d.mass", p.mass},
      {"env.push1d.damping", p.damping},   {"env.push1d.x0", p.x0},
      {"env.push1d.v0", p.v0}};
  for (const auto& [name, iv] : ranges) {
    if (!(iv.lo <= iv.hi)) {
      throw ValidationError(std::string(name) + " has lo > hi");
    }
  }
  const int len = e.physics.episode_len(e.env);
  const int min_len = c.min_episode_len();
  if (len < min_len) {
    throw ValidationError("episode_len " + std::to_string(len) +
                          " is shorter than history + future = " +
                          std::to_string(min_len));
  }
  // Grid construction checks the grid size for the environment.
  TrainingGrid(e.env, e.grid_size, e.physics);
  const int history = c.encoder.options.history;
  std::vector<LagRule> lags = c.encoder.probe_lags;
  lags.push_back(c.encoder.lag);
  for (const LagRule& lag : lags) {
    if (!lag.infinite && history - 1 + lag.steps > len - 2) {
      throw ValidationError("lag " + lag.ToString() + " leaves no admissible "
                            "prediction step with history " +
                            std::to_string(history) + " and episode_len " +
                            std::to_string(len));
    }
  }
  if (e.episodes_per_domain < 2) {
    throw ValidationError("env.episodes_per_domain must be at least 2");
  }
  c.policy.config.Validate();
}

std::string CanonicalText(const ExperimentConfig& c) {
  return EnvLines(c) + EncoderLines(c) + PolicyLines(c) + EvalLines(c);
}

uint64_t ConfigHash(const ExperimentConfig& c) {
  return Fnv1a64(std::string_view(CanonicalText(c)));
}
uint64_t DataStageHash(const ExperimentConfig& c) {
  return Fnv1a64(std::string_view(EnvLines(c)));
}
uint64_t EncoderStageHash(const ExperimentConfig& c) {
  return Fnv1a64(std::string_view(EnvLines(c) + EncoderLines(c)));
}
uint64_t PolicyStageHash(const ExperimentConfig& c) {
  return Fnv1a64(std::string_view(EnvLines(c) + EncoderLines(c) + PolicyLines(c)));
}

}  // namespace dadp
