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

#ifndef DADP_CLI_COMMANDS_H_
#define DADP_CLI_COMMANDS_H_

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "dadp/cli/config.h"

namespace dadp {

enum class OutputFormat { kCsv, kText };

OutputFormat ParseOutputFormat(std::string_view name);

struct RunContext {
  ExperimentConfig config;
  int threads = 1;
  OutputFormat format = OutputFormat::kCsv;
  std::ostream* out = nullptr;  // command summary
  std::ostream* log = nullptr;  // progress and warnings; may be null

  const std::filesystem::path& dir() const { return config.output_dir; }
};

// Run directory layout, one manifest per stage:
//   dataset.bin dataset.csv domains.csv             (dataset)
//   encoder.ckpt encoder_curve.csv                  (encoder)
//   probe.csv embeddings_lag_<lag>.csv              (probe)
//   policy_<variant>_seed<s>.ckpt and _loss.csv     (policy)
//   eval_<variant>.csv/.txt, contexts_<variant>.csv (eval)
//   sweep.csv                                       (sweep)
// Each stage checks the manifest of its inputs against the stage hash of
// the current configuration before reading them.
void CmdGenData(const RunContext& ctx);
void CmdTrainEncoder(const RunContext& ctx);
void CmdProbe(const RunContext& ctx);
void CmdTrainPolicy(const RunContext& ctx);
void CmdEval(const RunContext& ctx);
void CmdSweep(const RunContext& ctx);

// Verifies every manifest in `dir` (file hashes, recorded inputs, one
// master seed, one configuration across the evaluation outputs) and prints
// the ablation, context, sweep and probe tables that are present. Throws
// LineageError when `dir` holds no artifacts.
void CmdReport(const std::filesystem::path& dir, OutputFormat format,
               std::ostream& out);

// 2 validation, 3 lineage, 4 numeric, 1 anything else.
int ExitCodeFor(const std::exception& e);

// Parses the command line and runs one verb; returns the exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace dadp

#endif  // DADP_CLI_COMMANDS_H_
