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


#ifndef CESM_DISTRIBUTIONS_HPP
#define CESM_DISTRIBUTIONS_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cesm/linalg.hpp"

namespace cesm {

struct GaussianFamily {};

/// Complex t: g(s) = (1 + s/d)^{-(d+m)}, texture tau = d/q with q ~ Gamma(d, 1).
struct StudentTFamily {
  double d;
};

/// Complex K: texture tau ~ Gamma(shape nu, scale theta).
struct KFamily {
  double nu;
  double theta;
};

using Family = std::variant<GaussianFamily, StudentTFamily, KFamily>;

/// Throws on non-positive parameters.
void validate(const Family& family);
std::string describe(const Family& family);

/// A complex elliptically symmetric law CES_m(location, scatter, g).
class CESModel {
 public:
  CESModel(ComplexVector location, HermitianPD scatter, Family family);

  /// Zero location and identity scatter.
  static CESModel standard(Eigen::Index m, Family family);

  Eigen::Index dim() const { return location_.size(); }
  const ComplexVector& location() const { return location_; }
  const HermitianPD& scatter() const { return scatter_; }
  const Family& family() const { return family_; }

 private:
  ComplexVector location_;
  HermitianPD scatter_;
  Family family_;
};

/// m x n matrix of i.i.d. draws, one sample per column:
/// z = t + sqrt(tau) * scatter^{1/2} * x with x standard circular complex Gaussian.
/// Draw j consumes its own random stream (seed, j), so the result does not
/// depend on `threads`.
ComplexMatrix sample_ces(const CESModel& model, std::size_t n, std::uint64_t seed,
                         unsigned threads = 1);

/// n i.i.d. draws of |zeta|^2 = tau * Q, Q ~ Gamma(m, 1), for zeta ~ CES_m(0, I, g).
std::vector<double> sample_modular(const Family& family, Eigen::Index m, std::size_t n,
                                   std::uint64_t seed, unsigned threads = 1);

/// log g(s) up to a family-wide additive constant. Gaussian: -s.
/// Student t: -(d+m) log(1 + s/d). K: log of s^{(nu-m)/2} K_{nu-m}(2 sqrt(s/theta)).
double log_density_generator(const Family& family, Eigen::Index m, double s);

}  // namespace cesm

#endif  // CESM_DISTRIBUTIONS_HPP
