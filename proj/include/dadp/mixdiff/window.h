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

#ifndef DADP_MIXDIFF_WINDOW_H_
#define DADP_MIXDIFF_WINDOW_H_

#include <Eigen/Core>

namespace dadp {

// H history rows followed by F rows starting at the current step. Each row
// is (observation || action); windows are flattened row-major into a column
// vector and batched one window per column.
struct WindowLayout {
  int history = 16;
  int future = 4;
  int obs_dim = 1;
  int act_dim = 1;

  int rows() const { return history + future; }
  int token_dim() const { return obs_dim + act_dim; }
  int size() const { return rows() * token_dim(); }
  int index(int row, int col) const { return row * token_dim() + col; }
  // Row holding the current observation and the action to produce.
  int current_row() const { return history; }

  // Throws ValidationError unless future and obs_dim are positive and history
  // is non-negative.
  void Validate() const;

  bool operator==(const WindowLayout&) const = default;
};

// 1 on every history entry and on the observation entries of the current
// row, 0 elsewhere.
Eigen::VectorXd MakeMask(const WindowLayout& layout);

// z tiled across every row, then zeroed where the mask is 1. z must have
// token_dim entries; throws ValidationError otherwise.
Eigen::VectorXd BroadcastZ(const Eigen::VectorXd& z, const WindowLayout& layout,
                           const Eigen::VectorXd& mask);

// Batched form: z is token_dim x N.
Eigen::MatrixXd BroadcastZBatch(const Eigen::MatrixXd& z,
                                const WindowLayout& layout,
                                const Eigen::VectorXd& mask);

}  // namespace dadp

#endif  // DADP_MIXDIFF_WINDOW_H_
