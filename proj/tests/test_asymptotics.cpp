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

#include <Eigen/Eigenvalues>

#include "cesm/asymptotics.hpp"
#include "cesm/error.hpp"
#include "cesm/validation.hpp"

using namespace cesm;

namespace {

const ExpectationEngine kExact = ClosedFormEngine{};

ExpectationEngine mc(std::uint64_t seed, std::size_t n = 10'000'000) {
  return MonteCarloEngine{n, seed, 1};
}

}  // namespace

TEST_CASE("gaussian weights on gaussian data") {
  for (Eigen::Index m : {1, 3, 5}) {
    const auto w = WeightFamily::gaussian();
    const auto th = asymptotic_covariances(CESModel::standard(m, GaussianFamily{}), w, kExact);
    CHECK(th.sigma == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(th.alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(th.beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(th.a1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(th.a2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(th.sigma1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(th.sigma2) < 1e-14);
    const Eigen::Index p = m * m;
    CHECK((th.Sigma_M - ComplexMatrix::Identity(p, p)).norm() < 1e-13);
    CHECK((th.Sigma_t - ComplexMatrix::Identity(m, m)).norm() < 1e-13);
    CHECK(th.trace_Sigma_M() == doctest::Approx(static_cast<double>(p)));
  }
}

TEST_CASE("SCM theory with a general scatter") {
  ComplexMatrix lambda(2, 2);
  lambda << 2.0, Complex(0.3, -0.4), Complex(0.3, 0.4), 1.5;
  const CESModel model(ComplexVector::Zero(2), HermitianPD(lambda), GaussianFamily{});
  const auto th = asymptotic_covariances(model, WeightFamily::gaussian(), kExact);
  const ComplexMatrix expected = kron(lambda.transpose(), lambda);
  CHECK((th.Sigma_M - expected).norm() < 1e-13 * expected.norm());
  CHECK((th.Sigma_t - lambda).norm() < 1e-13);
  CHECK(th.M_e == HermitianPD(lambda).matrix());
}

TEST_CASE("gaussian weights on K data with nu theta = 1 give sigma = 1") {
  const double sigma = solve_sigma(KFamily{4.0, 0.25}, 3, WeightFamily::gaussian(), kExact);
  CHECK(sigma == doctest::Approx(1.0).epsilon(1e-12));
  // E|zeta|^2 = m nu theta, so sigma = 1/(nu theta)
  CHECK(solve_sigma(KFamily{2.0, 2.0}, 3, WeightFamily::gaussian(), kExact) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("case 1 closed form") {
  const auto w = WeightFamily::student_t(4.0, 3);
  const auto th = asymptotic_covariances(student_t_scenario(), w, kExact);
  CHECK(th.sigma == 1.0);
  CHECK(th.a1 == doctest::Approx(7.0 / 8.0).epsilon(1e-14));
  CHECK(th.a2 == doctest::Approx(1.0 / 2.0).epsilon(1e-14));
  CHECK(th.alpha == doctest::Approx(7.0 / 8.0).epsilon(1e-14));
  CHECK(th.beta == doctest::Approx(7.0 / 8.0).epsilon(1e-14));
  CHECK(th.alpha / (th.beta * th.beta) == doctest::Approx(8.0 / 7.0).epsilon(1e-14));
  CHECK(th.sigma1 == doctest::Approx(8.0 / 7.0).epsilon(1e-14));
  CHECK(th.sigma2 == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(th.trace_Sigma_M() == doctest::Approx(78.0 / 7.0).epsilon(1e-14));
  CHECK(th.trace_Sigma_t() == doctest::Approx(24.0 / 7.0).epsilon(1e-14));

  const ComplexMatrix id9 = ComplexMatrix::Identity(9, 9);
  const ComplexVector v = vec(ComplexMatrix(ComplexMatrix::Identity(3, 3)));
  const ComplexMatrix expected = (8.0 / 7.0) * id9 + (2.0 / 7.0) * v * v.adjoint();
  CHECK((th.Sigma_M - expected).norm() < 1e-13);
}

TEST_CASE("structure of the covariances") {
  const auto th = asymptotic_covariances(k_scenario(), WeightFamily::student_t(4.0, 3), mc(1, 100000));
  CommutationMatrix k(3);
  CHECK(th.Omega_M == th.Sigma_M * k.to_dense().cast<Complex>());
  CHECK((th.Sigma_M - th.Sigma_M.adjoint()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(th.Sigma_M);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  CHECK((th.Sigma_t - (th.alpha / (th.beta * th.beta)) * th.M_e).norm() == 0.0);
}

TEST_CASE("Monte Carlo agrees with the Beta closed form") {
  const auto w = WeightFamily::student_t(4.0, 3);
  const Family f = StudentTFamily{4.0};
  const auto exact = make_expectation(f, 3, w, kExact)->moments(1.0);
  const auto approx = make_expectation(f, 3, w, mc(7))->moments(1.0);
  auto close = [](double a, double b) { return std::abs(a - b) <= 5e-3 * std::abs(b); };
  CHECK(close(approx.psi2, exact.psi2));
  CHECK(close(approx.psi2_sq, exact.psi2_sq));
  CHECK(close(approx.x_dpsi2, exact.x_dpsi2));
  CHECK(close(approx.psi1_sq, exact.psi1_sq));
  CHECK(close(approx.u1, exact.u1));
  CHECK(close(approx.dpsi1, exact.dpsi1));
  CHECK(close(approx.r_du1, exact.r_du1));
  CHECK(close(approx.x2_du2, exact.x2_du2));

  const auto c_exact = compute_constants(f, 3, w, 1.0, kExact);
  const auto c_mc = compute_constants(f, 3, w, 1.0, mc(7));
  CHECK(c_mc.a1 == doctest::Approx(c_exact.a1).epsilon(3e-3));
  CHECK(c_mc.a2 == doctest::Approx(c_exact.a2).epsilon(3e-3));
  CHECK(c_mc.alpha == doctest::Approx(c_exact.alpha).epsilon(3e-3));
  CHECK(c_mc.beta == doctest::Approx(c_exact.beta).epsilon(3e-3));
  CHECK(solve_sigma(f, 3, w, mc(7)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("case 2 by Monte Carlo") {
  const auto w = WeightFamily::student_t(4.0, 3);
  const auto a = make_expectation(KFamily{4.0, 0.25}, 3, w, mc(11));
  const double sigma = solve_sigma(*a);
  CHECK(std::abs(a->mean_psi2(sigma) - 3.0) < 1e-3 * 3.0);
  // monotone across a grid bracketing the root
  double prev = 0.0;
  for (int i = -5; i < 5; ++i) {
    const double v = a->mean_psi2(sigma * std::pow(1.2, i));
    CHECK(v > prev);
    prev = v;
  }
  const double other = solve_sigma(KFamily{4.0, 0.25}, 3, w, mc(12));
  CHECK(other == doctest::Approx(sigma).epsilon(3e-3));

  const auto th = build_covariances(HermitianPD::identity(3), sigma, compute_constants(*a, sigma));
  CHECK(th.trace_Sigma_M() == doctest::Approx(6.6978).epsilon(0.01));
  CHECK(th.trace_Sigma_t() == doctest::Approx(2.6732).epsilon(0.01));
}

TEST_CASE("error paths") {
  const auto w = WeightFamily::student_t(4.0, 3);
  CHECK_THROWS_AS(make_expectation(KFamily{4.0, 0.25}, 3, w, kExact), Error);
  CHECK_THROWS_AS(make_expectation(StudentTFamily{4.0}, 3, w, mc(1, 100)), Error);
  // no finite second texture moment: no closed form for gaussian weights
  CHECK_THROWS_AS(make_expectation(StudentTFamily{2.0}, 3, WeightFamily::gaussian(), kExact),
                  Error);
  // sup psi2 = d + 1 = 2 < m = 3: no root
  try {
    solve_sigma(GaussianFamily{}, 3, WeightFamily::student_t(1.0, 1), mc(2, 20000));
    FAIL("expected an unsolvable scale");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsolvableScale);
  }
  const AsymptoticConstants zero_a2{1.0, 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(build_covariances(HermitianPD::identity(2), 1.0, zero_a2), Error);
}
