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

#include "dadp/cli/artifacts.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dadp/errors.h"
#include "dadp/nnmath/binary_io.h"
#include "dadp/nnmath/hash.h"

namespace dadp {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kSuffix[] = ".manifest.json";

}  // namespace

std::string FileHashHex(const fs::path& path) {
  return HashToHex(Fnv1a64(std::span<const char>(ReadFileBytes(path))));
}

std::string ManifestToJson(const Manifest& m) {
  // nlohmann::json keeps object keys sorted, and doubles are printed with
  // round-trip precision, so equal manifests give equal bytes.
  json j;
  j["name"] = m.name;
  j["kind"] = m.kind;
  j["format_version"] = m.format_version;
  j["config_hash"] = HashToHex(m.config_hash);
  j["stage_hash"] = HashToHex(m.stage_hash);
  j["seed"] = m.seed;
  j["files"] = m.files;
  j["inputs"] = m.inputs;
  j["info"] = m.info;
  json metrics = json::object();
  for (const auto& [k, v] : m.metrics) {
    metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
  }
  j["metrics"] = metrics;
  return j.dump(2) + "\n";
}

Manifest ManifestFromJson(const std::string& text, const std::string& source) {
  Manifest m;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<uint32_t>();
    if (m.format_version != kManifestVersion) {
      throw LineageError(source + ": manifest format version " +
                         std::to_string(m.format_version) + " is not supported");
    }
    m.name = j.at("name").get<std::string>();
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = HashFromHex(j.at("config_hash").get<std::string>());
    m.stage_hash = HashFromHex(j.at("stage_hash").get<std::string>());
    m.seed = j.at("seed").get<uint64_t>();
    m.files = j.at("files").get<std::map<std::string, std::string>>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.info = j.at("info").get<std::map<std::string, std::string>>();
    for (const auto& [k, v] : j.at("metrics").items()) {
      m.metrics[k] = v.is_null() ? std::nan("") : v.get<double>();
    }
  } catch (const json::exception& e) {
    throw IoError(source + ": malformed manifest (" + e.what() + ")");
  } catch (const ValidationError& e) {
    throw IoError(source + ": malformed manifest (" + e.what() + ")");
  }
  return m;
}

void WriteManifest(const fs::path& dir, const Manifest& m) {
  WriteTextFile(dir / (m.name + kSuffix), ManifestToJson(m));
}

Manifest ReadManifest(const fs::path& file) {
  const std::vector<char> bytes = ReadFileBytes(file);
  return ManifestFromJson(std::string(bytes.begin(), bytes.end()),
                          file.string());
}

std::vector<Manifest> ReadAllManifests(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string n = entry.path().filename().string();
    if (entry.is_regular_file() && n.size() > sizeof(kSuffix) - 1 &&
        n.ends_with(kSuffix)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Manifest> out;
  for (const auto& f : files) out.push_back(ReadManifest(f));
  return out;
}

void VerifyFiles(const fs::path& dir, const Manifest& m) {
  for (const auto& [file, hash] : m.files) {
    if (!fs::exists(dir / file)) {
      throw LineageError(m.name + ": missing artifact file " + file);
    }
    if (FileHashHex(dir / file) != hash) {
      throw LineageError(m.name + ": " + file +
                         " does not match the hash recorded in its manifest");
    }
  }
}

Manifest RequireUpstream(const fs::path& dir, const std::string& name,
                         uint64_t stage_hash) {
  const fs::path file = dir / (name + kSuffix);
  if (!fs::exists(file)) {
    throw LineageError("missing upstream artifact '" + name + "' in " +
                  dir.string() + "; run the earlier pipeline stage first");
  }
  Manifest m = ReadManifest(file);
  if (m.stage_hash != stage_hash) {
    throw LineageError("'" + name + "' was produced with a different "
                       "configuration (stage hash " + HashToHex(m.stage_hash) +
                       ", expected " + HashToHex(stage_hash) + ")");
  }
  VerifyFiles(dir, m);
  return m;
}

}  // namespace dadp
