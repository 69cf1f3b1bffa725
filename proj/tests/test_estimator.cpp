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


#include <doctest.h>

#include <numeric>
#include <random>

#include "cesm/distributions.hpp"
#include "cesm/error.hpp"
#include "cesm/estimator.hpp"
#include "cesm/rng.hpp"
#include "cesm/validation.hpp"

using namespace cesm;

namespace {

ComplexMatrix scenario_samples(std::size_t n, std::uint64_t seed) {
  return sample_ces(student_t_scenario(), n, seed);
}

double rel(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("gaussian weights give the sample mean and SCM") {
  const ComplexMatrix z = scenario_samples(200, 1);
  const auto est = joint_m_estimate(z, WeightFamily::gaussian());
  const ComplexVector mean = z.rowwise().mean();
  const ComplexMatrix c = z.colwise() - mean;
  const ComplexMatrix scm = c * c.adjoint() / 200.0;
  CHECK(est.converged);
  CHECK(est.iterations <= 2);
  CHECK(rel(est.location, mean) < 1e-12);
  CHECK(rel(est.scatter.matrix(), scm) < 1e-12);
  const auto r = residuals(z, WeightFamily::gaussian(), mean, HermitianPD(scm));
  CHECK(r.residual_t < 1e-13);
  CHECK(r.residual_M < 1e-13);
}

TEST_CASE("three-point example") {
  ComplexMatrix z(1, 3);
  z << 1.0, Complex(0.0, 1.0), -1.0;
  const auto est = joint_m_estimate(z, WeightFamily::gaussian());
  CHECK(std::abs(est.location(0) - Complex(0.0, 1.0 / 3.0)) < 1e-15);
  CHECK(std::abs(est.scatter.matrix()(0, 0) - 8.0 / 9.0) < 1e-15);
}

TEST_CASE("student-t fit is consistent at N = 10^4") {
  const ComplexMatrix z = scenario_samples(10000, 2);
  const auto est = joint_m_estimate(z, WeightFamily::student_t(4.0, 3));
  REQUIRE(est.converged);
  CHECK((est.location - scenario_location()).norm() < 0.1);
  CHECK(rel(est.scatter.matrix(), ComplexMatrix::Identity(3, 3)) < 0.1);
  CHECK(est.residual_t <= 1e-8);
  CHECK(est.residual_M <= 1e-8);

  const auto again = residuals(z, WeightFamily::student_t(4.0, 3), est.location, est.scatter);
  CHECK(again.residual_t <= 1e-8);
  CHECK(again.residual_M <= 1e-8);

  // (t_e, 2 Lambda) is not a solution
  const auto wrong = residuals(z, WeightFamily::student_t(4.0, 3), scenario_location(),
                               HermitianPD(2.0 * ComplexMatrix::Identity(3, 3)));
  CHECK(wrong.residual_M > 0.1);
}

TEST_CASE("scatter change decreases along the sweeps") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const auto est = joint_m_estimate(scenario_samples(50, seed), WeightFamily::student_t(4.0, 3));
    REQUIRE(est.converged);
    int rises = 0;
    for (std::size_t k = 1; k < est.scatter_change.size(); ++k) {
      if (est.scatter_change[k] > est.scatter_change[k - 1]) ++rises;
    }
    WARN(rises == 0);
  }
}

TEST_CASE("affine equivariance") {
  const ComplexMatrix z = scenario_samples(60, 3);
  CounterRng rng(99, 0);
  std::normal_distribution<double> g;
  ComplexMatrix b(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) b(i) = Complex(g(rng), g(rng));
  ComplexVector c(3);
  c << Complex(-2.0, 5.0), Complex(0.5, 0.0), Complex(3.0, -1.0);
  const ComplexMatrix bz = (b * z).colwise() + c;

  SolverConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iter = 5000;
  for (const auto& w : {WeightFamily::student_t(4.0, 3), WeightFamily::gaussian()}) {
    const auto e = joint_m_estimate(z, w, cfg);
    const auto f = joint_m_estimate(bz, w, cfg);
    REQUIRE(e.converged);
    REQUIRE(f.converged);
    const ComplexVector t_expected = b * e.location + c;
    const ComplexMatrix m_expected = b * e.scatter.matrix() * b.adjoint();
    CHECK(rel(f.location, t_expected) < 1e-8);
    CHECK(rel(f.scatter.matrix(), m_expected) < 1e-8);
  }
}

TEST_CASE("permutation invariance") {
  const ComplexMatrix z = scenario_samples(97, 4);
  std::vector<Eigen::Index> order(97);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::rotate(order.begin(), order.begin() + 31, order.end());
  ComplexMatrix zp(3, 97);
  for (Eigen::Index j = 0; j < 97; ++j) zp.col(j) = z.col(order[static_cast<std::size_t>(j)]);
  const auto w = WeightFamily::student_t(4.0, 3);
  const auto a = joint_m_estimate(z, w);
  const auto b = joint_m_estimate(zp, w);
  CHECK(rel(a.location, b.location) < 1e-12);
  CHECK(rel(a.scatter.matrix(), b.scatter.matrix()) < 1e-12);
}

TEST_CASE("provided init reaches the same fixed point") {
  const ComplexMatrix z = scenario_samples(80, 5);
  const auto w = WeightFamily::student_t(4.0, 3);
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 5000;
  const auto a = joint_m_estimate(z, w, cfg);
  cfg.init = ProvidedInit{ComplexVector::Zero(3), 5.0 * ComplexMatrix::Identity(3, 3)};
  const auto b = joint_m_estimate(z, w, cfg);
  REQUIRE(b.converged);
  CHECK(rel(a.location, b.location) < 1e-9);
  CHECK(rel(a.scatter.matrix(), b.scatter.matrix()) < 1e-9);
}

TEST_CASE("non-convergence is a result, not an error") {
  SolverConfig cfg;
  cfg.max_iter = 1;
  const auto est = joint_m_estimate(scenario_samples(40, 6), WeightFamily::student_t(4.0, 3), cfg);
  CHECK_FALSE(est.converged);
  CHECK(est.iterations == 1);
}

TEST_CASE("error paths") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInternalConsistency;
  };
  const auto w = WeightFamily::student_t(4.0, 3);
  CHECK(kind_of([&] { joint_m_estimate(scenario_samples(3, 1), w); }) == ErrorKind::kRankDeficient);
  ComplexMatrix bad = scenario_samples(10, 1);
  bad(1, 4) = Complex(std::nan(""), 0.0);
  CHECK(kind_of([&] { joint_m_estimate(bad, w); }) == ErrorKind::kInvalidArgument);
  // all samples on a 2-dim subspace: singular SCM
  ComplexMatrix flat = scenario_samples(10, 1);
  flat.row(2).setZero();
  CHECK(kind_of([&] { joint_m_estimate(flat, w); }) == ErrorKind::kSingularScatter);
  SolverConfig cfg;
  cfg.tol = -1.0;
  CHECK(kind_of([&] { joint_m_estimate(scenario_samples(10, 1), w, cfg); }) ==
        ErrorKind::kInvalidArgument);
  cfg = {};
  cfg.init = ProvidedInit{ComplexVector::Zero(2), ComplexMatrix::Identity(2, 2)};
  CHECK(kind_of([&] { joint_m_estimate(scenario_samples(10, 1), w, cfg); }) ==
        ErrorKind::kDimensionMismatch);
}
