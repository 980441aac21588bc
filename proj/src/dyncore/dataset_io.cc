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

#include "dadp/dyncore/dataset_io.h"

#include <cstdio>

#include "dadp/errors.h"
#include "dadp/nnmath/binary_io.h"

namespace dadp {
namespace {

double AsFloat(double v) { return static_cast<double>(static_cast<float>(v)); }

void AppendNumber(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

}  // namespace

std::vector<char> SerializeDataset(const Dataset& dataset) {
  BinaryWriter w;
  w.Bytes("DADP");
  w.U32(kDatasetFormatVersion);
  w.U32(static_cast<uint32_t>(dataset.env));
  w.U32(static_cast<uint32_t>(dataset.obs_dim));
  w.U32(static_cast<uint32_t>(dataset.act_dim));
  w.U32(static_cast<uint32_t>(dataset.param_dim));
  w.U32(static_cast<uint32_t>(dataset.domains.size()));
  for (const auto& d : dataset.domains) {
    for (double xi : d.params) w.F64(xi);
    w.U32(static_cast<uint32_t>(d.episodes.size()));
    for (const auto& ep : d.episodes) {
      w.U32(static_cast<uint32_t>(ep.length));
      for (int t = 0; t < ep.length; ++t) {
        for (int i = 0; i < ep.obs_dim; ++i) w.F32(static_cast<float>(ep.obs(t, i)));
        for (int i = 0; i < ep.act_dim; ++i) w.F32(static_cast<float>(ep.action(t, i)));
        w.F32(static_cast<float>(ep.rewards[t]));
      }
    }
  }
  return w.buffer();
}

Dataset ParseDataset(std::span<const char> bytes) {
  BinaryReader r(bytes);
  if (r.Bytes(4) != "DADP") throw IoError("not a dataset file (bad magic)");
  const uint32_t version = r.U32();
  if (version != kDatasetFormatVersion) {
    throw IoError("unsupported dataset version " + std::to_string(version));
  }
  Dataset ds;
  const uint32_t env = r.U32();
  if (env > static_cast<uint32_t>(EnvId::kPush1D)) throw IoError("unknown env id");
  ds.env = static_cast<EnvId>(env);
  ds.obs_dim = static_cast<int>(r.U32());
  ds.act_dim = static_cast<int>(r.U32());
  ds.param_dim = static_cast<int>(r.U32());
  const uint32_t n_domains = r.U32();
  ds.domains.resize(n_domains);
  for (auto& d : ds.domains) {
    d.params.resize(ds.param_dim);
    for (auto& xi : d.params) xi = r.F64();
    d.episodes.resize(r.U32());
    for (auto& ep : d.episodes) {
      ep.length = static_cast<int>(r.U32());
      ep.obs_dim = ds.obs_dim;
      ep.act_dim = ds.act_dim;
      for (int t = 0; t < ep.length; ++t) {
        for (int i = 0; i < ds.obs_dim; ++i) ep.observations.push_back(r.F32());
        for (int i = 0; i < ds.act_dim; ++i) ep.actions.push_back(r.F32());
        ep.rewards.push_back(r.F32());
      }
    }
  }
  if (!r.AtEnd()) throw IoError("trailing bytes after dataset");
  return ds;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  WriteFileBytes(path, SerializeDataset(dataset));
}

Dataset LoadDataset(const std::filesystem::path& path) {
  return ParseDataset(ReadFileBytes(path));
}

Dataset RoundDatasetToFloat(const Dataset& dataset) {
  Dataset out = dataset;
  for (auto& d : out.domains) {
    for (auto& ep : d.episodes) {
      for (auto& v : ep.observations) v = AsFloat(v);
      for (auto& v : ep.actions) v = AsFloat(v);
      for (auto& v : ep.rewards) v = AsFloat(v);
    }
  }
  return out;
}

std::string DatasetToCsv(const Dataset& dataset) {
  std::string out = "domain_index";
  for (int i = 0; i < dataset.param_dim; ++i) out += ",xi_" + std::to_string(i);
  out += ",episode_index,step";
  for (int i = 0; i < dataset.obs_dim; ++i) out += ",obs_" + std::to_string(i);
  for (int i = 0; i < dataset.act_dim; ++i) out += ",act_" + std::to_string(i);
  out += ",reward\n";
  for (size_t di = 0; di < dataset.domains.size(); ++di) {
    const auto& d = dataset.domains[di];
    for (size_t e = 0; e < d.episodes.size(); ++e) {
      const auto& ep = d.episodes[e];
      for (int t = 0; t < ep.length; ++t) {
        out += std::to_string(di);
        for (double xi : d.params) {
          out += ',';
          AppendNumber(out, xi);
        }
        out += ',' + std::to_string(e) + ',' + std::to_string(t);
        for (int i = 0; i < ep.obs_dim; ++i) {
          out += ',';
          AppendNumber(out, AsFloat(ep.obs(t, i)));
        }
        for (int i = 0; i < ep.act_dim; ++i) {
          out += ',';
          AppendNumber(out, AsFloat(ep.action(t, i)));
        }
        out += ',';
        AppendNumber(out, AsFloat(ep.rewards[t]));
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace dadp
