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

#ifndef DADP_NNMATH_HASH_H_
#define DADP_NNMATH_HASH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace dadp {

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view bytes);
uint64_t Fnv1a64(std::span<const char> bytes);

// Fixed-width lowercase hex, 16 digits.
std::string HashToHex(uint64_t hash);
// Inverse of HashToHex; throws ValidationError on malformed input.
uint64_t HashFromHex(std::string_view hex);

}  // namespace dadp

#endif  // DADP_NNMATH_HASH_H_
