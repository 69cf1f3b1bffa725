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


#ifndef CESM_WEIGHTS_HPP
#define CESM_WEIGHTS_HPP

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace cesm {

/// The pair (u1, u2) of an M-estimator together with psi_i(s) = s u_i(s) and
/// their analytic derivatives. u1 is evaluated at the distance d, u2 at d^2.
class WeightFamily {
 public:
  struct Gaussian {};
  struct StudentT {
    double d;
    Eigen::Index m;
  };
  using Kind = std::variant<Gaussian, StudentT>;

  static WeightFamily gaussian();
  /// u2(s) = (d+m)/(d+s), u1(r) = u2(r^2).
  static WeightFamily student_t(double d, Eigen::Index m);

  const Kind& kind() const { return kind_; }
  bool is_gaussian() const { return std::holds_alternative<Gaussian>(kind_); }
  std::string describe() const;

  double u1(double r) const;
  double u2(double s) const;
  double du1(double r) const;
  double du2(double s) const;
  double psi1(double r) const { return r * u1(r); }
  double psi2(double s) const { return s * u2(s); }
  double dpsi1(double r) const;
  double dpsi2(double s) const;

 private:
  explicit WeightFamily(Kind kind) : kind_(kind) {}

  Kind kind_;
};

/// Type-erased view of the eight weight callables, so the derivative check can
/// also be pointed at modified functions.
struct WeightFunctions {
  std::function<double(double)> u1, u2, psi1, psi2;
  std::function<double(double)> du1, du2, dpsi1, dpsi2;

  static WeightFunctions of(const WeightFamily& w);
};

struct DerivativeReport {
  std::size_t points_checked = 0;
  double max_relative_error = 0.0;
  /// sup over the grid of s psi_i'(s); boundedness witness.
  double sup_s_dpsi1 = 0.0;
  double sup_s_dpsi2 = 0.0;
  /// Raised when s psi_i'(s) keeps growing past the end of the grid.
  bool psi1_unbounded = false;
  bool psi2_unbounded = false;
};

/// Compares every analytic derivative with a central finite difference at
/// each grid point (relative tolerance 1e-6). Throws Error(kDerivativeMismatch)
/// naming the first offending function and point.
DerivativeReport check_derivatives(const WeightFunctions& w, const std::vector<double>& grid);
DerivativeReport check_derivatives(const WeightFamily& w, const std::vector<double>& grid);

/// `count` log-spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace cesm

#endif  // CESM_WEIGHTS_HPP
