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


#include "cesm/distributions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cesm/error.hpp"
#include "cesm/parallel.hpp"
#include "cesm/rng.hpp"

namespace cesm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double draw_texture(const Family& family, CounterRng& rng) {
  return std::visit(Overloaded{
                        [](const GaussianFamily&) { return 1.0; },
                        [&](const StudentTFamily& f) {
                          std::gamma_distribution<double> q(f.d, 1.0);
                          return f.d / q(rng);
                        },
                        [&](const KFamily& f) {
                          std::gamma_distribution<double> tau(f.nu, f.theta);
                          return tau(rng);
                        },
                    },
                    family);
}

// log K_a(x) for x > 0, switching to the large-argument expansion before
// std::cyl_bessel_k underflows.
double log_bessel_k(double a, double x) {
  if (x < 500.0) return std::log(std::cyl_bessel_k(a, x));
  const double mu = 4.0 * a * a;
  const double series = 1.0 + (mu - 1.0) / (8.0 * x) + (mu - 1.0) * (mu - 9.0) / (128.0 * x * x);
  return 0.5 * std::log(M_PI / (2.0 * x)) - x + std::log(series);
}

}  // namespace

void validate(const Family& family) {
  std::visit(Overloaded{
                 [](const GaussianFamily&) {},
                 [](const StudentTFamily& f) {
                   if (!(f.d > 0.0) || !std::isfinite(f.d)) {
                     throw Error(ErrorKind::kInvalidArgument, "student-t family: d must be > 0");
                   }
                 },
                 [](const KFamily& f) {
                   if (!(f.nu > 0.0) || !(f.theta > 0.0) || !std::isfinite(f.nu) ||
                       !std::isfinite(f.theta)) {
                     throw Error(ErrorKind::kInvalidArgument,
                                 "K family: nu and theta must be > 0");
                   }
                 },
             },
             family);
}

std::string describe(const Family& family) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const GaussianFamily&) { out << "gaussian"; },
                 [&](const StudentTFamily& f) { out << "student-t(d=" << f.d << ")"; },
                 [&](const KFamily& f) { out << "k(nu=" << f.nu << ", theta=" << f.theta << ")"; },
             },
             family);
  return out.str();
}

CESModel::CESModel(ComplexVector location, HermitianPD scatter, Family family)
    : location_(std::move(location)), scatter_(std::move(scatter)), family_(family) {
  if (location_.size() < 1) {
    throw Error(ErrorKind::kInvalidArgument, "CESModel: dimension must be >= 1");
  }
  if (location_.size() != scatter_.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "CESModel: location and scatter dimensions differ");
  }
  if (!all_finite(location_)) {
    throw Error(ErrorKind::kInvalidArgument, "CESModel: non-finite location");
  }
  validate(family_);
}

CESModel CESModel::standard(Eigen::Index m, Family family) {
  return CESModel(ComplexVector::Zero(m), HermitianPD::identity(m), family);
}

ComplexMatrix sample_ces(const CESModel& model, std::size_t n, std::uint64_t seed,
                         unsigned threads) {
  const Eigen::Index m = model.dim();
  const ComplexMatrix root = model.scatter().sqrt();
  ComplexMatrix out(m, static_cast<Eigen::Index>(n));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  parallel_for(n, threads, [&](std::size_t j) {
    CounterRng rng(seed, j);
    const double tau = draw_texture(model.family(), rng);
    std::normal_distribution<double> normal;
    ComplexVector x(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      x(i) = Complex(re * inv_sqrt2, im * inv_sqrt2);
    }
    out.col(static_cast<Eigen::Index>(j)) = model.location() + std::sqrt(tau) * (root * x);
  });
  return out;
}

std::vector<double> sample_modular(const Family& family, Eigen::Index m, std::size_t n,
                                   std::uint64_t seed, unsigned threads) {
  validate(family);
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "sample_modular: m must be >= 1");
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t j) {
    CounterRng rng(seed, j);
    const double tau = draw_texture(family, rng);
    std::gamma_distribution<double> q(static_cast<double>(m), 1.0);
    out[j] = tau * q(rng);
  });
  return out;
}

double log_density_generator(const Family& family, Eigen::Index m, double s) {
  if (!(s >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "log_density_generator: s must be >= 0");
  }
  const double md = static_cast<double>(m);
  return std::visit(
      Overloaded{
          [&](const GaussianFamily&) { return -s; },
          [&](const StudentTFamily& f) { return -(f.d + md) * std::log1p(s / f.d); },
          [&](const KFamily& f) {
            // int tau^{-m} e^{-s/tau} Gamma(tau; nu, theta) dtau
            //   ∝ s^{a/2} K_a(2 sqrt(s/theta)),  a = nu - m.
            const double a = f.nu - md;
            if (s == 0.0) {
              if (a > 0.0) return std::lgamma(a) - std::log(2.0) + 0.5 * a * std::log(f.theta);
              return std::numeric_limits<double>::infinity();
            }
            return 0.5 * a * std::log(s) + log_bessel_k(std::abs(a), 2.0 * std::sqrt(s / f.theta));
          },
      },
      family);
}

}  // namespace cesm
