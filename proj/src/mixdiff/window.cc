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

#include "dadp/mixdiff/window.h"

#include <string>

#include "dadp/errors.h"

namespace dadp {

void WindowLayout::Validate() const {
  if (history < 0 || future < 1 || obs_dim < 1 || act_dim < 0) {
    throw ValidationError("window needs future and obs_dim positive, history non-negative");
  }
}

Eigen::VectorXd MakeMask(const WindowLayout& layout) {
  layout.Validate();
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(layout.size());
  mask.head(layout.history * layout.token_dim()).setOnes();
  for (int i = 0; i < layout.obs_dim; ++i) {
    mask[layout.index(layout.current_row(), i)] = 1.0;
  }
  return mask;
}

Eigen::MatrixXd BroadcastZBatch(const Eigen::MatrixXd& z,
                                const WindowLayout& layout,
                                const Eigen::VectorXd& mask) {
  if (z.rows() != layout.token_dim()) {
    throw ValidationError("z has " + std::to_string(z.rows()) +
                          " entries, token has " +
                          std::to_string(layout.token_dim()));
  }
  if (mask.size() != layout.size()) {
    throw ValidationError("mask does not match the window");
  }
  Eigen::MatrixXd out(layout.size(), z.cols());
  for (int r = 0; r < layout.rows(); ++r) {
    out.middleRows(r * layout.token_dim(), layout.token_dim()) = z;
  }
  for (int i = 0; i < layout.size(); ++i) {
    if (mask[i] != 0.0) out.row(i).setZero();
  }
  return out;
}

Eigen::VectorXd BroadcastZ(const Eigen::VectorXd& z, const WindowLayout& layout,
                           const Eigen::VectorXd& mask) {
  return BroadcastZBatch(z, layout, mask).col(0);
}

}  // namespace dadp
