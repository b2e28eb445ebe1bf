// Copyright 2026 The lda2net Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lda2net {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input data: malformed files, violated invariants, mismatched
// dimensions. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad arguments or configuration. The CLI maps these to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DataError(message);
}

inline void require_arg(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

}  // namespace detail
}  // namespace lda2net
