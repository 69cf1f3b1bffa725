// Copyright 2026 The cesm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CESM_ERROR_HPP
#define CESM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cesm {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNotPositiveDefinite,
  kRankDeficient,
  kDegenerateWeights,
  kSingularScatter,
  kUnsolvableScale,
  kHypothesisViolation,
  kDerivativeMismatch,
  kInternalConsistency,
  kExperimentFailure,
  kParse,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cesm

#endif  // CESM_ERROR_HPP
