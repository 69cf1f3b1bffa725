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


#ifndef CESM_DETAIL_REAL_ESTIMATOR_HPP
#define CESM_DETAIL_REAL_ESTIMATOR_HPP

#include <optional>

#include "cesm/estimator.hpp"
#include "cesm/linalg.hpp"
#include "cesm/weights.hpp"

namespace cesm::detail {

struct RealJointEstimate {
  RealVector location;
  RealMatrix scatter;
  int iterations = 0;
  bool converged = false;
};

/// Real-valued analogue of joint_m_estimate on p = 2m dimensional data (one
/// sample per column), using the rescaled weights u2R(s) = u2(s/2) and
/// u1R(r) = u1(r/sqrt(2)). Only used to check the complex/real correspondence.
RealJointEstimate real_joint_m_estimate(const RealMatrix& samples, const WeightFamily& w,
                                        double tol, int max_iter,
                                        const std::optional<std::pair<RealVector, RealMatrix>>& init = {});

}  // namespace cesm::detail

#endif  // CESM_DETAIL_REAL_ESTIMATOR_HPP
