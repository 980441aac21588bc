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

#include "dadp/nnmath/checkpoint.h"

#include "dadp/errors.h"
#include "dadp/nnmath/binary_io.h"

namespace dadp {
namespace {

constexpr char kMagic[] = "DADPCKPT";

void WriteMatrixF32(BinaryWriter& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      w.F32(static_cast<float>(m(r, c)));
    }
  }
}

void ReadMatrixF32(BinaryReader& r, Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.F32();
  }
}

}  // namespace

const Mlp& Checkpoint::network(const std::string& name) const {
  for (const auto& [n, net] : networks) {
    if (n == name) return net;
  }
  throw ValidationError("checkpoint '" + module_tag + "' has no network " + name);
}

const std::vector<double>& Checkpoint::array(const std::string& name) const {
  auto it = arrays.find(name);
  if (it == arrays.end()) {
    throw ValidationError("checkpoint '" + module_tag + "' has no array " + name);
  }
  return it->second;
}

const std::string& Checkpoint::meta(const std::string& key) const {
  auto it = metadata.find(key);
  if (it == metadata.end()) {
    throw ValidationError("checkpoint '" + module_tag + "' has no metadata " + key);
  }
  return it->second;
}

std::vector<char> SerializeCheckpoint(const Checkpoint& ckpt) {
  BinaryWriter w;
  w.Bytes(std::string_view(kMagic, 8));
  w.U32(kCheckpointVersion);
  w.String(ckpt.module_tag);
  w.U32(static_cast<uint32_t>(ckpt.networks.size()));
  for (const auto& [name, net] : ckpt.networks) {
    w.String(name);
    w.U32(static_cast<uint32_t>(net.layer_dims().size()));
    for (int d : net.layer_dims()) w.U32(static_cast<uint32_t>(d));
    for (int l = 0; l < net.num_layers(); ++l) {
      WriteMatrixF32(w, net.weights()[l]);
      WriteMatrixF32(w, net.biases()[l]);
    }
  }
  w.U64(ckpt.seed);
  w.U64(ckpt.config_hash);
  w.U32(static_cast<uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    w.String(k);
    w.String(v);
  }
  w.U32(static_cast<uint32_t>(ckpt.arrays.size()));
  for (const auto& [name, values] : ckpt.arrays) {
    w.String(name);
    w.U32(static_cast<uint32_t>(values.size()));
    for (double v : values) w.F64(v);
  }
  return w.buffer();
}

Checkpoint ParseCheckpoint(std::span<const char> bytes) {
  BinaryReader r(bytes);
  if (r.Bytes(8) != std::string_view(kMagic, 8)) {
    throw IoError("not a checkpoint (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.module_tag = r.String();
  const uint32_t count = r.U32();
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = r.String();
    const uint32_t n_dims = r.U32();
    std::vector<int> dims(n_dims);
    for (auto& d : dims) d = static_cast<int>(r.U32());
    Mlp net(dims);
    for (int l = 0; l < net.num_layers(); ++l) {
      ReadMatrixF32(r, net.weights()[l]);
      Eigen::MatrixXd b(net.biases()[l].size(), 1);
      ReadMatrixF32(r, b);
      net.biases()[l] = b.col(0);
    }
    ckpt.networks.emplace_back(std::move(name), std::move(net));
  }
  ckpt.seed = r.U64();
  ckpt.config_hash = r.U64();
  const uint32_t n_meta = r.U32();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.String();
    ckpt.metadata[k] = r.String();
  }
  const uint32_t n_arrays = r.U32();
  for (uint32_t i = 0; i < n_arrays; ++i) {
    std::string name = r.String();
    std::vector<double> values(r.U32());
    for (auto& v : values) v = r.F64();
    ckpt.arrays[name] = std::move(values);
  }
  if (!r.AtEnd()) throw IoError("trailing bytes after checkpoint");
  return ckpt;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  WriteFileBytes(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return ParseCheckpoint(ReadFileBytes(path));
}

}  // namespace dadp
