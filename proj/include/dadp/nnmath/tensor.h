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

#ifndef DADP_NNMATH_TENSOR_H_
#define DADP_NNMATH_TENSOR_H_

#include <string>

#include <Eigen/Core>

namespace dadp {

// Named flat view over a parameter or gradient buffer.
struct TensorView {
  std::string name;
  double* data = nullptr;
  Eigen::Index size = 0;
};

struct ConstTensorView {
  std::string name;
  const double* data = nullptr;
  Eigen::Index size = 0;
};

}  // namespace dadp

#endif  // DADP_NNMATH_TENSOR_H_
