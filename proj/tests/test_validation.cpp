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

#include "cesm/error.hpp"
#include "cesm/validation.hpp"

using namespace cesm;

namespace {

const CheckLine& line(const CheckReport& r, const std::string& quantity) {
  for (const auto& l : r.lines) {
    if (l.quantity == quantity) return l;
  }
  FAIL("no line " << quantity << " in " << r.name);
  throw std::logic_error("unreachable");
}

ExperimentConfig gaussian_config(std::size_t trials) {
  return ExperimentConfig{CESModel::standard(3, GaussianFamily{}),
                          WeightFamily::gaussian(),
                          {100},
                          trials,
                          2024,
                          SolverConfig{},
                          ClosedFormEngine{},
                          1};
}

}  // namespace

TEST_CASE("reference grid and scenarios") {
  const std::vector<std::size_t> expected = {5, 6, 8, 10, 12, 15, 18, 22, 28, 34, 42, 53, 65, 81, 100};
  CHECK(reference_grid() == expected);
  CHECK(scenario_location()(2) == Complex(3.0, 1.5));
  CHECK(std::holds_alternative<KFamily>(k_scenario().family()));
}

TEST_CASE("SCM experiment: N tr MSE(M) -> m^2 and N Cov(t) -> I") {
  const auto curve = run_mse_experiment(gaussian_config(5000));
  REQUIRE(curve.points.size() == 1);
  const auto& p = curve.points[0];
  CHECK(p.failures == 0);
  CHECK(p.mse_M_theory == doctest::Approx(0.09));
  CHECK(p.mse_t_theory == doctest::Approx(0.03));
  CHECK(p.mse_M_emp * 100.0 == doctest::Approx(9.0).epsilon(0.05));
  CHECK(p.mse_t_emp * 100.0 == doctest::Approx(3.0).epsilon(0.05));

  const auto circ = check_location_circularity(gaussian_config(5000), 100, 5000);
  CHECK(circ.passed());
  const auto pseudo = check_scatter_pseudo_structure(gaussian_config(5000), 100, 5000);
  CHECK(pseudo.passed());
}

TEST_CASE("experiments are reproducible and independent of the thread count") {
  ExperimentConfig cfg{student_t_scenario(), WeightFamily::student_t(4.0, 3), {8, 20}, 200, 5,
                       SolverConfig{}, ClosedFormEngine{}, 1};
  const auto a = run_mse_experiment(cfg);
  cfg.threads = 3;
  const auto b = run_mse_experiment(cfg);
  REQUIRE(a.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.points[i].mse_t_emp == b.points[i].mse_t_emp);
    CHECK(a.points[i].mse_M_emp == b.points[i].mse_M_emp);
  }
  cfg.seed = 6;
  CHECK(run_mse_experiment(cfg).points[0].mse_M_emp != a.points[0].mse_M_emp);
}

TEST_CASE("failure accounting") {
  ExperimentConfig cfg{student_t_scenario(), WeightFamily::student_t(4.0, 3), {20}, 50, 5,
                       SolverConfig{}, ClosedFormEngine{}, 1};
  cfg.solver.max_iter = 1;
  try {
    run_mse_experiment(cfg);
    FAIL("expected the failure-rate limit to trip");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kExperimentFailure);
  }
  cfg.sample_sizes = {3};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.sample_sizes = {20};
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("appendix limits: gaussian weights give A = I and D = I") {
  const auto r = check_appendix_limits(GaussianFamily{}, 2, WeightFamily::gaussian(), 100000, 3,
                                       ClosedFormEngine{});
  CHECK(line(r, "|A_N - A|_F / |A|_F").measured < 1e-15);
  CHECK(line(r, "|D_N - D|_F / |D|_F").measured < 1e-15);
  CHECK(line(r, "max |E[omega chi^T] entry| / standard error").passed);
  CHECK(line(r, "max |E[kappa kappa^T] - I/p|").passed);
  CHECK(line(r, "max |third moment of kappa|").passed);
}

TEST_CASE("appendix limits: matched Student-t") {
  const auto r = check_appendix_limits(StudentTFamily{4.0}, 3, WeightFamily::student_t(4.0, 3),
                                       200000, 4, ClosedFormEngine{});
  CHECK(line(r, "|A_N - A|_F / |A|_F").passed);
  CHECK(line(r, "|D_N - D|_F / |D|_F").passed);
  CHECK(line(r, "max |E[omega chi^T] entry| / standard error").passed);
  CHECK(line(r, "max |third moment of kappa|").passed);
  CHECK(line(r, "|B_N|_F / sqrt(E|B_1|_F^2 / n)").passed);
  CHECK(line(r, "|C_N|_F / sqrt(E|C_1|_F^2 / n)").passed);
  CHECK_FALSE(line(r, "|B_N|_F / sqrt(E|B_1|_F^2 / n)").gating);
}

TEST_CASE("P symmetry") {
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 5000;
  const ComplexMatrix z = sample_ces(student_t_scenario(), 100, 8);
  CHECK(check_p_symmetry(z, WeightFamily::student_t(4.0, 3), cfg).passed());
  CHECK(check_p_symmetry(z, WeightFamily::gaussian(), cfg).passed());
  const ComplexMatrix z1 = sample_ces(CESModel::standard(1, StudentTFamily{4.0}), 10, 9);
  CHECK(check_p_symmetry(z1, WeightFamily::student_t(4.0, 1), cfg).passed());
}

TEST_CASE("report bookkeeping") {
  CheckReport r;
  r.add("a", 1.0, 2.0);
  r.add("b", 3.0, 2.0, false);
  CHECK(r.passed());
  r.add("c", 2.0, 2.0);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.lines.back().passed);
}
