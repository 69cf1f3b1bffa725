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


#include "cesm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cesm/error.hpp"

namespace cesm {

WeightFamily WeightFamily::gaussian() { return WeightFamily(Gaussian{}); }

WeightFamily WeightFamily::student_t(double d, Eigen::Index m) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw Error(ErrorKind::kInvalidArgument, "student-t weights: d must be > 0");
  }
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "student-t weights: m must be >= 1");
  return WeightFamily(StudentT{d, m});
}

std::string WeightFamily::describe() const {
  if (is_gaussian()) return "gaussian";
  const auto& t = std::get<StudentT>(kind_);
  std::ostringstream out;
  out << "student-t(d=" << t.d << ", m=" << t.m << ")";
  return out.str();
}

double WeightFamily::u1(double r) const {
  if (is_gaussian()) return 1.0;
  const auto& t = std::get<StudentT>(kind_);
  return (t.d + static_cast<double>(t.m)) / (t.d + r * r);
}

double WeightFamily::u2(double s) const {
  if (is_gaussian()) return 1.0;
  const auto& t = std::get<StudentT>(kind_);
  return (t.d + static_cast<double>(t.m)) / (t.d + s);
}

double WeightFamily::du1(double r) const {
  if (is_gaussian()) return 0.0;
  const auto& t = std::get<StudentT>(kind_);
  const double den = t.d + r * r;
  return -2.0 * r * (t.d + static_cast<double>(t.m)) / (den * den);
}

double WeightFamily::du2(double s) const {
  if (is_gaussian()) return 0.0;
  const auto& t = std::get<StudentT>(kind_);
  const double den = t.d + s;
  return -(t.d + static_cast<double>(t.m)) / (den * den);
}

double WeightFamily::dpsi1(double r) const {
  if (is_gaussian()) return 1.0;
  const auto& t = std::get<StudentT>(kind_);
  const double r2 = r * r;
  const double den = t.d + r2;
  return (t.d + static_cast<double>(t.m)) * (t.d - r2) / (den * den);
}

double WeightFamily::dpsi2(double s) const {
  if (is_gaussian()) return 1.0;
  const auto& t = std::get<StudentT>(kind_);
  const double den = t.d + s;
  return (t.d + static_cast<double>(t.m)) * t.d / (den * den);
}

WeightFunctions WeightFunctions::of(const WeightFamily& w) {
  WeightFunctions f;
  f.u1 = [w](double r) { return w.u1(r); };
  f.u2 = [w](double s) { return w.u2(s); };
  f.psi1 = [w](double r) { return w.psi1(r); };
  f.psi2 = [w](double s) { return w.psi2(s); };
  f.du1 = [w](double r) { return w.du1(r); };
  f.du2 = [w](double s) { return w.du2(s); };
  f.dpsi1 = [w](double r) { return w.dpsi1(r); };
  f.dpsi2 = [w](double s) { return w.dpsi2(s); };
  return f;
}

namespace {

constexpr double kDerivativeTolerance = 1e-6;

double central_difference(const std::function<double(double)>& f, double s) {
  double h = 1e-5 * std::max(s, 1e-3);
  if (s - h < 0.0) h = s;  // stay on the domain at s = 0
  if (h == 0.0) {
    h = 1e-8;
    return (f(s + h) - f(s)) / h;
  }
  return (f(s + h) - f(s - h)) / (2.0 * h);
}

// s psi'(s) at 10x and 100x the grid end, compared against the grid sup.
bool keeps_growing(const std::function<double(double)>& dpsi, double s_max, double grid_sup) {
  const double a = 10.0 * s_max * dpsi(10.0 * s_max);
  const double b = 100.0 * s_max * dpsi(100.0 * s_max);
  return b > 1.01 * a && a > 1.01 * grid_sup;
}

}  // namespace

DerivativeReport check_derivatives(const WeightFunctions& w, const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "check_derivatives: empty grid");
  struct Pair {
    const char* name;
    const std::function<double(double)>* f;
    const std::function<double(double)>* df;
  };
  const Pair pairs[] = {{"u1", &w.u1, &w.du1},
                        {"u2", &w.u2, &w.du2},
                        {"psi1", &w.psi1, &w.dpsi1},
                        {"psi2", &w.psi2, &w.dpsi2}};

  DerivativeReport report;
  double s_max = 0.0;
  for (double s : grid) {
    if (!(s >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "check_derivatives: s must be >= 0");
    s_max = std::max(s_max, s);
    for (const auto& p : pairs) {
      const double analytic = (*p.df)(s);
      const double numeric = central_difference(*p.f, s);
      // Normalize by the local slope scale f(s)/s so that zero crossings of
      // the derivative (psi1' at r^2 = d) are not divided by ~0.
      const double slope = std::abs((*p.f)(s)) / std::max(s, 1e-3);
      const double scale = std::max({std::abs(analytic), slope, 1e-12});
      const double rel = std::abs(numeric - analytic) / scale;
      if (!(rel <= kDerivativeTolerance)) {
        std::ostringstream msg;
        msg << "derivative of " << p.name << " disagrees with finite difference at s=" << s
            << " (analytic " << analytic << ", numeric " << numeric << ")";
        throw Error(ErrorKind::kDerivativeMismatch, msg.str());
      }
      report.max_relative_error = std::max(report.max_relative_error, rel);
    }
    report.sup_s_dpsi1 = std::max(report.sup_s_dpsi1, s * w.dpsi1(s));
    report.sup_s_dpsi2 = std::max(report.sup_s_dpsi2, s * w.dpsi2(s));
    ++report.points_checked;
  }
  report.psi1_unbounded = keeps_growing(w.dpsi1, s_max, report.sup_s_dpsi1);
  report.psi2_unbounded = keeps_growing(w.dpsi2, s_max, report.sup_s_dpsi2);
  return report;
}

DerivativeReport check_derivatives(const WeightFamily& w, const std::vector<double>& grid) {
  return check_derivatives(WeightFunctions::of(w), grid);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw Error(ErrorKind::kInvalidArgument, "log_grid: need 0 < lo <= hi and count >= 1");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

}  // namespace cesm
