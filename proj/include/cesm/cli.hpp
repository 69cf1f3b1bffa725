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


#ifndef CESM_CLI_HPP
#define CESM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cesm::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNotConverged = 2,
  kHypothesis = 3,
  kFailureRate = 4,
  kCheckFailed = 5,
};

/// Entry point shared by the `cesm` executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cesm::cli

#endif  // CESM_CLI_HPP
