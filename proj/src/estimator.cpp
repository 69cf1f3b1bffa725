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


#include "cesm/estimator.hpp"

#include <cmath>
#include <sstream>

#include "cesm/detail/real_estimator.hpp"
#include "cesm/detail/reweighting.hpp"
#include "cesm/error.hpp"

namespace cesm {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "solver: tol must be > 0");
  if (max_iter < 1) throw Error(ErrorKind::kInvalidArgument, "solver: max_iter must be >= 1");
}

namespace {

void check_samples(const ComplexMatrix& samples) {
  if (samples.rows() < 1) throw Error(ErrorKind::kInvalidArgument, "samples: dimension must be >= 1");
  if (samples.cols() <= samples.rows()) {
    std::ostringstream msg;
    msg << "need more samples than dimensions (N=" << samples.cols() << ", m=" << samples.rows()
        << ")";
    throw Error(ErrorKind::kRankDeficient, msg.str());
  }
  if (!all_finite(samples)) throw Error(ErrorKind::kInvalidArgument, "samples: non-finite entry");
}

}  // namespace

std::pair<ComplexVector, ComplexMatrix> sample_mean_scm(const ComplexMatrix& samples) {
  const Eigen::Index n = samples.cols();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const ComplexVector mean =
      detail::weighted_column_sum<Complex>(samples, ones, 0, n) / static_cast<double>(n);
  const ComplexMatrix centered = samples.colwise() - mean;
  const ComplexMatrix scm = detail::hermitize<Complex>(
      detail::weighted_outer_sum<Complex>(centered, ones, 0, n) / static_cast<double>(n));
  return {mean, scm};
}

JointEstimate joint_m_estimate(const ComplexMatrix& samples, const WeightFamily& w,
                               const SolverConfig& cfg) {
  cfg.validate();
  check_samples(samples);
  const Eigen::Index m = samples.rows();

  ComplexVector t0;
  ComplexMatrix m0;
  if (cfg.init) {
    if (cfg.init->location.size() != m || cfg.init->scatter.rows() != m) {
      throw Error(ErrorKind::kDimensionMismatch, "solver: init dimension mismatch");
    }
    t0 = cfg.init->location;
    m0 = HermitianPD(cfg.init->scatter).matrix();
  } else {
    std::tie(t0, m0) = sample_mean_scm(samples);
    detail::require_well_conditioned<Complex>(m0);
  }

  auto loc_weight = [&w](double d2) { return w.u1(std::sqrt(d2)); };
  auto scatter_weight = [&w](double d2) { return w.u2(d2); };
  auto solved = detail::reweighting_solve<Complex>(samples, std::move(t0), std::move(m0),
                                                   loc_weight, scatter_weight, cfg.tol,
                                                   cfg.max_iter);
  return JointEstimate{std::move(solved.location),
                       HermitianPD(solved.scatter),
                       solved.iterations,
                       solved.residuals.location,
                       solved.residuals.scatter,
                       solved.converged,
                       std::move(solved.scatter_change)};
}

EquationResiduals residuals(const ComplexMatrix& samples, const WeightFamily& w,
                            const ComplexVector& t, const HermitianPD& m) {
  check_samples(samples);
  if (t.size() != samples.rows() || m.dim() != samples.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "residuals: dimension mismatch");
  }
  auto loc_weight = [&w](double d2) { return w.u1(std::sqrt(d2)); };
  auto scatter_weight = [&w](double d2) { return w.u2(d2); };
  const auto r = detail::evaluate_residuals<Complex>(samples, t, m.matrix(), loc_weight,
                                                     scatter_weight);
  return {r.location, r.scatter};
}

namespace detail {

RealJointEstimate real_joint_m_estimate(const RealMatrix& samples, const WeightFamily& w,
                                        double tol, int max_iter,
                                        const std::optional<std::pair<RealVector, RealMatrix>>& init) {
  if (samples.cols() <= samples.rows()) {
    throw Error(ErrorKind::kRankDeficient, "real estimator: need more samples than dimensions");
  }
  const Eigen::Index n = samples.cols();
  RealVector t0;
  RealMatrix m0;
  if (init) {
    t0 = init->first;
    m0 = init->second;
  } else {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    t0 = weighted_column_sum<double>(samples, ones, 0, n) / static_cast<double>(n);
    const RealMatrix centered = samples.colwise() - t0;
    m0 = hermitize<double>(weighted_outer_sum<double>(centered, ones, 0, n) / static_cast<double>(n));
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto loc_weight = [&w, inv_sqrt2](double d2) { return w.u1(std::sqrt(d2) * inv_sqrt2); };
  auto scatter_weight = [&w](double d2) { return w.u2(0.5 * d2); };
  auto solved = reweighting_solve<double>(samples, std::move(t0), std::move(m0), loc_weight,
                                          scatter_weight, tol, max_iter);
  return {std::move(solved.location), std::move(solved.scatter), solved.iterations,
          solved.converged};
}

}  // namespace detail
}  // namespace cesm
