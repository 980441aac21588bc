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

#ifndef DADP_CLI_ARTIFACTS_H_
#define DADP_CLI_ARTIFACTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dadp {

inline constexpr uint32_t kManifestVersion = 1;

// Sidecar written next to every group of artifact files. `files` and
// `inputs` map file names (relative to the run directory) to the hex FNV-1a
// hash of their bytes.
struct Manifest {
  std::string name;  // file stem: <name>.manifest.json
  std::string kind;  // dataset, encoder, policy, eval, contexts, sweep, probe
  uint32_t format_version = kManifestVersion;
  uint64_t config_hash = 0;
  uint64_t stage_hash = 0;
  uint64_t seed = 0;
  std::map<std::string, std::string> files;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> info;
  std::map<std::string, double> metrics;

  bool operator==(const Manifest&) const = default;
};

std::string FileHashHex(const std::filesystem::path& path);

// Deterministic JSON (sorted keys, fixed number formatting).
std::string ManifestToJson(const Manifest& m);
Manifest ManifestFromJson(const std::string& text, const std::string& source);

void WriteManifest(const std::filesystem::path& dir, const Manifest& m);
// Throws IoError when missing, LineageError on a version mismatch.
Manifest ReadManifest(const std::filesystem::path& file);
// Every *.manifest.json in `dir`, sorted by file name.
std::vector<Manifest> ReadAllManifests(const std::filesystem::path& dir);

// Checks that every file listed by the manifest exists with the recorded
// hash. Throws IoError for a missing file, LineageError for a mismatch.
void VerifyFiles(const std::filesystem::path& dir, const Manifest& m);

// Loads <name>.manifest.json, verifies its files and requires its stage hash
// to equal `stage_hash`. Throws IoError when the artifact is missing and
// LineageError when it was produced from a different configuration.
Manifest RequireUpstream(const std::filesystem::path& dir,
                         const std::string& name, uint64_t stage_hash);

}  // namespace dadp

#endif  // DADP_CLI_ARTIFACTS_H_
