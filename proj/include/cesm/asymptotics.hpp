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


#ifndef CESM_ASYMPTOTICS_HPP
#define CESM_ASYMPTOTICS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cesm/distributions.hpp"
#include "cesm/linalg.hpp"
#include "cesm/weights.hpp"

namespace cesm {

/// Expectations over the modular variate |zeta|^2 by Monte Carlo. The same
/// draws are reused for every sigma (common random numbers).
struct MonteCarloEngine {
  static constexpr std::size_t kMinSamples = 10'000;
  std::size_t samples = 10'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Exact moments. Available for Gaussian weights under any family whose
/// texture has a finite second moment, and for Student-t weights on
/// Student-t data with the same degrees of freedom.
struct ClosedFormEngine {};

using ExpectationEngine = std::variant<MonteCarloEngine, ClosedFormEngine>;

/// Expectations entering the asymptotic constants, all at x = sigma |zeta|^2
/// and r = sqrt(x).
struct ModularMoments {
  double psi2 = 0.0;          // E psi2(x)
  double psi2_sq = 0.0;       // E psi2(x)^2
  double x_dpsi2 = 0.0;       // E x psi2'(x)
  double psi1_sq = 0.0;       // E psi1(r)^2
  double u1 = 0.0;            // E u1(r)
  double dpsi1 = 0.0;         // E psi1'(r)
  double r_du1 = 0.0;         // E r u1'(r)
  double x2_du2 = 0.0;        // E x^2 u2'(x)
};

/// Evaluates ModularMoments for one (family, m, weights) triple.
class ModularExpectation {
 public:
  virtual ~ModularExpectation() = default;

  virtual double mean_psi2(double sigma) const = 0;
  virtual ModularMoments moments(double sigma) const = 0;
  /// Root of E psi2(sigma |zeta|^2) = m when known in closed form.
  virtual std::optional<double> exact_sigma() const { return std::nullopt; }
  virtual bool is_exact() const = 0;

  Eigen::Index dim() const { return m_; }

 protected:
  explicit ModularExpectation(Eigen::Index m) : m_(m) {}

 private:
  Eigen::Index m_;
};

std::unique_ptr<ModularExpectation> make_expectation(const Family& family, Eigen::Index m,
                                                     const WeightFamily& w,
                                                     const ExpectationEngine& engine);

/// Consistency scale: the root of E psi2(sigma |zeta|^2) = m. Bracket
/// expansion by factors of 10 from sigma = 1 inside [1e-6, 1e6], then
/// bisection on log sigma to 1e-10 relative width.
double solve_sigma(const ModularExpectation& expectation);
double solve_sigma(const Family& family, Eigen::Index m, const WeightFamily& w,
                   const ExpectationEngine& engine);

struct AsymptoticConstants {
  double alpha;
  double beta;
  double a1;
  double a2;
};

/// Throws Error(kHypothesisViolation) when beta <= 0.
AsymptoticConstants compute_constants(const ModularExpectation& expectation, double sigma);
AsymptoticConstants compute_constants(const Family& family, Eigen::Index m,
                                      const WeightFamily& w, double sigma,
                                      const ExpectationEngine& engine);

struct AsymptoticCovariances {
  double sigma;
  double alpha;
  double beta;
  double a1;
  double a2;
  double sigma1;
  double sigma2;
  ComplexMatrix M_e;      // scatter / sigma
  ComplexMatrix Sigma_t;  // (alpha / beta^2) M_e
  ComplexMatrix Sigma_M;  // sigma1 M_e^T (x) M_e + sigma2 vec(M_e) vec(M_e)^H
  ComplexMatrix Omega_M;  // Sigma_M K_m

  double trace_Sigma_t() const { return Sigma_t.real().trace(); }
  double trace_Sigma_M() const { return Sigma_M.real().trace(); }
};

AsymptoticCovariances build_covariances(const HermitianPD& scatter, double sigma,
                                        const AsymptoticConstants& constants);

/// solve_sigma + compute_constants + build_covariances with one engine.
AsymptoticCovariances asymptotic_covariances(const CESModel& model, const WeightFamily& w,
                                             const ExpectationEngine& engine);

}  // namespace cesm

#endif  // CESM_ASYMPTOTICS_HPP
