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

#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "dadp/cli/commands.h"
#include "dadp/cli/config.h"
#include "dadp/errors.h"

namespace dadp {

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Domain-adaptive diffusion policy pipeline", "dadp"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
  std::string format = "csv";
  app.add_option("--config", config_path, "Experiment YAML file");
  app.add_option("--seed", seed, "Override the master seed");
  app.add_option("--out", out_dir, "Override the output directory");
  app.add_option("--threads", threads,
                 "Workers for independent jobs (rollouts, seeds, lags)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Summary format")
      ->check(CLI::IsMember({"csv", "text"}));

  using Command = std::function<void(const RunContext&)>;
  const std::map<std::string, std::pair<Command, std::string>> verbs = {
      {"gen-data", {CmdGenData, "Simulate expert rollouts on the grid"}},
      {"train-encoder", {CmdTrainEncoder, "Train the context encoder"}},
      {"probe", {CmdProbe, "Probe encoders trained at each lag"}},
      {"train-policy", {CmdTrainPolicy, "Train one policy per variant and seed"}},
      {"eval", {CmdEval, "Roll out trained policies on IID and OOD domains"}},
      {"sweep", {CmdSweep, "Evaluate over the guidance-scale grid"}},
  };
  for (const auto& [name, verb] : verbs) {
    app.add_subcommand(name, verb.second)->fallthrough();
  }
  std::string report_dir;
  CLI::App* report =
      app.add_subcommand("report", "Verify lineage and print summary tables");
  report->fallthrough();
  report->add_option("dir", report_dir, "Run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const OutputFormat fmt = ParseOutputFormat(format);
    if (report->parsed()) {
      std::filesystem::path dir = report_dir;
      if (dir.empty() && out_dir) dir = *out_dir;
      if (dir.empty() && !config_path.empty()) {
        dir = LoadConfig(config_path).output_dir;
      }
      if (dir.empty()) {
        throw ValidationError("report needs a directory, --out or --config");
      }
      CmdReport(dir, fmt, out);
      return 0;
    }
    if (config_path.empty()) {
      throw ValidationError("--config is required");
    }
    RunContext ctx;
    ctx.config = LoadConfig(config_path);
    if (seed) ctx.config.seed = *seed;
    if (out_dir) ctx.config.output_dir = *out_dir;
    ValidateConfig(ctx.config);
    ctx.threads = threads;
    ctx.format = fmt;
    ctx.out = &out;
    ctx.log = &err;
    for (const auto& [name, verb] : verbs) {
      if (app.got_subcommand(name)) verb.first(ctx);
    }
    return 0;
  } catch (const YAML::Exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  }
}

}  // namespace dadp
