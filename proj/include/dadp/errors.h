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

#ifndef DADP_ERRORS_H_
#define DADP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dadp {

// Bad input: shapes, bounds, configuration values.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An artifact is missing or was produced from a different configuration.
class LineageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite losses or gradients.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dadp

#endif  // DADP_ERRORS_H_
