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

#include "cesm/distributions.hpp"
#include "cesm/error.hpp"
#include "cesm/weights.hpp"

using namespace cesm;

TEST_CASE("student-t weight values") {
  const auto w = WeightFamily::student_t(4.0, 3);
  CHECK(w.u2(0.0) == 7.0 / 4.0);
  CHECK(w.u2(4.0) == 7.0 / 8.0);
  CHECK(w.u1(2.0) == w.u2(4.0));
  CHECK(w.dpsi1(2.0) == 0.0);
  CHECK(w.dpsi2(3.0) == doctest::Approx(7.0 * 4.0 / 49.0));
  CHECK(w.describe() == "student-t(d=4, m=3)");
  CHECK_THROWS_AS(WeightFamily::student_t(0.0, 3), Error);
  CHECK_THROWS_AS(WeightFamily::student_t(-1.0, 3), Error);
}

TEST_CASE("gaussian weight values") {
  const auto w = WeightFamily::gaussian();
  CHECK(w.u2(17.3) == 1.0);
  CHECK(w.psi2(5.0) == 5.0);
  CHECK(w.dpsi2(5.0) == 1.0);
  CHECK(w.psi1(0.0) == 0.0);
  CHECK(w.du1(2.0) == 0.0);
  CHECK(w.is_gaussian());
}

TEST_CASE("psi_i(s) = s u_i(s) exactly") {
  const auto w = WeightFamily::student_t(2.5, 4);
  for (double s : log_grid(1e-4, 1e4, 97)) {
    CHECK(w.psi1(s) == s * w.u1(s));
    CHECK(w.psi2(s) == s * w.u2(s));
  }
}

TEST_CASE("student-t derivatives and boundedness") {
  const auto w = WeightFamily::student_t(4.0, 3);
  std::vector<double> grid = log_grid(0.1, 100.0, 61);
  const auto r = check_derivatives(w, grid);
  CHECK(r.points_checked == grid.size());
  CHECK(r.max_relative_error < 1e-6);

  const auto wide = check_derivatives(w, log_grid(1e-6, 1e9, 151));
  CHECK(wide.sup_s_dpsi2 < 7.0);
  CHECK_FALSE(wide.psi1_unbounded);
  CHECK_FALSE(wide.psi2_unbounded);

  double sup_psi2 = 0.0, prev = -1.0;
  for (double s : log_grid(1e-6, 1e9, 151)) {
    const double p = w.psi2(s);
    CHECK(p >= prev);
    prev = p;
    sup_psi2 = std::max(sup_psi2, p);
    CHECK(w.u1(s) >= 0.0);
    CHECK(w.u2(s) >= 0.0);
  }
  CHECK(sup_psi2 <= 7.0);
}

TEST_CASE("gaussian psi is flagged unbounded") {
  const auto grid = log_grid(0.1, 100.0, 31);
  const auto r = check_derivatives(WeightFamily::gaussian(), grid);
  CHECK(r.sup_s_dpsi2 == doctest::Approx(100.0));
  CHECK(r.psi1_unbounded);
  CHECK(r.psi2_unbounded);
}

TEST_CASE("a corrupted derivative is caught at the first grid point") {
  auto f = WeightFunctions::of(WeightFamily::student_t(4.0, 3));
  const auto good = f.dpsi2;
  f.dpsi2 = [good](double s) { return 1.1 * good(s); };
  const std::vector<double> grid = {0.1, 1.0, 10.0};
  try {
    check_derivatives(f, grid);
    FAIL("expected a derivative mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDerivativeMismatch);
    const std::string msg = e.what();
    CHECK(msg.find("psi2") != std::string::npos);
    CHECK(msg.find("s=0.1") != std::string::npos);
  }
  CHECK_THROWS_AS(check_derivatives(WeightFamily::gaussian(), {}), Error);
  CHECK_THROWS_AS(check_derivatives(WeightFamily::gaussian(), {-1.0}), Error);
}

TEST_CASE("E psi1'(|zeta|) > 0 under the matched Student-t law") {
  const auto w = WeightFamily::student_t(4.0, 3);
  const std::size_t n = 200000;
  const auto x = sample_modular(StudentTFamily{4.0}, 3, n, 31);
  double sum = 0.0, sum_sq = 0.0;
  for (double s : x) {
    const double v = w.dpsi1(std::sqrt(s));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(mean > 5.0 * se);
}

TEST_CASE("log_grid") {
  const auto g = log_grid(1e-2, 1e2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-2));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(1e2));
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), Error);
}
