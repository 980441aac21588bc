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

#ifndef DADP_NNMATH_PARALLEL_H_
#define DADP_NNMATH_PARALLEL_H_

#include <functional>

namespace dadp {

// Calls fn(i) for i in [0, n) on up to `threads` workers and rethrows the
// first exception raised. Callers write results into pre-sized slots so
// the outcome does not depend on scheduling.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

}  // namespace dadp

#endif  // DADP_NNMATH_PARALLEL_H_
