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

#ifndef DADP_TESTS_SUPPORT_GRAD_SUITE_H_
#define DADP_TESTS_SUPPORT_GRAD_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "support/grad_check.h"

namespace dadp::testing {

struct ShapeCheck {
  std::string shape;
  GradCheckResult result;
};

// Central-difference checks of every network the pipeline trains, each
// through the loss it is trained with: the bare MLP, the encoder with its
// heads (with and without actions), the denoiser of each variant and the two
// probe networks.
std::vector<ShapeCheck> RunGradientSuite(uint64_t seed, int coords = 20);

}  // namespace dadp::testing

#endif  // DADP_TESTS_SUPPORT_GRAD_SUITE_H_
