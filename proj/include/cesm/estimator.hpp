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


#ifndef CESM_ESTIMATOR_HPP
#define CESM_ESTIMATOR_HPP

#include <optional>
#include <vector>

#include "cesm/linalg.hpp"
#include "cesm/weights.hpp"

namespace cesm {

struct ProvidedInit {
  ComplexVector location;
  ComplexMatrix scatter;
};

struct SolverConfig {
  /// Relative tolerance on the sweep-to-sweep change of t (scaled by
  /// sqrt(tr M)) and of M (Frobenius, relative).
  double tol = 1e-9;
  int max_iter = 500;
  /// Empty means sample mean + sample covariance.
  std::optional<ProvidedInit> init;

  void validate() const;
};

/// Fitted (t_N, M_N) with convergence diagnostics.
struct JointEstimate {
  ComplexVector location;
  HermitianPD scatter;
  int iterations = 0;
  double residual_t = 0.0;
  double residual_M = 0.0;
  bool converged = false;
  /// Relative change of M at each sweep.
  std::vector<double> scatter_change;
};

struct EquationResiduals {
  double residual_t;
  double residual_M;
};

/// Joint M-estimate of location and scatter from the columns of `samples`
/// (m x N, one sample per column) by the reweighting algorithm.
///
/// Throws Error with kRankDeficient (N <= m), kDegenerateWeights,
/// kSingularScatter or kInvalidArgument. Running out of iterations is not an
/// error: the result comes back with converged == false.
JointEstimate joint_m_estimate(const ComplexMatrix& samples, const WeightFamily& w,
                               const SolverConfig& cfg = {});

/// Scaled residuals of the estimating equations at (t, M); see JointEstimate.
EquationResiduals residuals(const ComplexMatrix& samples, const WeightFamily& w,
                            const ComplexVector& t, const HermitianPD& m);

/// Sample mean and 1/N sample covariance.
std::pair<ComplexVector, ComplexMatrix> sample_mean_scm(const ComplexMatrix& samples);

}  // namespace cesm

#endif  // CESM_ESTIMATOR_HPP
