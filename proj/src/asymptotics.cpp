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


#include "cesm/asymptotics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cesm/error.hpp"
#include "cesm/parallel.hpp"

namespace cesm {
namespace {

constexpr std::size_t kBlock = 4096;

double pairwise(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (end - begin <= 8) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise(v, begin, mid) + pairwise(v, mid, end);
}

class MonteCarloExpectation final : public ModularExpectation {
 public:
  MonteCarloExpectation(const Family& family, Eigen::Index m, const WeightFamily& w,
                        const MonteCarloEngine& engine)
      : ModularExpectation(m),
        w_(w),
        threads_(engine.threads),
        draws_(sample_modular(family, m, engine.samples, engine.seed, engine.threads)) {}

  double mean_psi2(double sigma) const override {
    return reduce<1>(sigma, [&](double x, double* acc) { acc[0] += w_.psi2(x); })[0];
  }

  ModularMoments moments(double sigma) const override {
    const auto s = reduce<8>(sigma, [&](double x, double* acc) {
      const double r = std::sqrt(x);
      const double psi2 = w_.psi2(x);
      const double psi1 = w_.psi1(r);
      acc[0] += psi2;
      acc[1] += psi2 * psi2;
      acc[2] += x * w_.dpsi2(x);
      acc[3] += psi1 * psi1;
      acc[4] += w_.u1(r);
      acc[5] += w_.dpsi1(r);
      acc[6] += r * w_.du1(r);
      acc[7] += x * x * w_.du2(x);
    });
    return {s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7]};
  }

  bool is_exact() const override { return false; }

 private:
  // Per-block partial sums in fixed block order, combined pairwise, so the
  // result is identical for any thread count.
  template <std::size_t K, class Fn>
  std::array<double, K> reduce(double sigma, Fn&& fn) const {
    const std::size_t n = draws_.size();
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::array<double, K>> partial(blocks);
    parallel_for(blocks, threads_, [&](std::size_t b) {
      std::array<double, K> acc{};
      const std::size_t end = std::min(n, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) fn(sigma * draws_[i], acc.data());
      partial[b] = acc;
    });
    std::array<double, K> out{};
    std::vector<double> column(blocks);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t b = 0; b < blocks; ++b) column[b] = partial[b][k];
      out[k] = pairwise(column, 0, blocks) / static_cast<double>(n);
    }
    return out;
  }

  WeightFamily w_;
  unsigned threads_;
  std::vector<double> draws_;
};

struct TextureMoments {
  double first;
  double second;
};

std::optional<TextureMoments> texture_moments(const Family& family) {
  if (std::holds_alternative<GaussianFamily>(family)) return TextureMoments{1.0, 1.0};
  if (const auto* t = std::get_if<StudentTFamily>(&family)) {
    // tau = d / q, q ~ Gamma(d, 1)
    if (t->d <= 2.0) return std::nullopt;
    return TextureMoments{t->d / (t->d - 1.0), t->d * t->d / ((t->d - 1.0) * (t->d - 2.0))};
  }
  const auto& k = std::get<KFamily>(family);
  return TextureMoments{k.nu * k.theta, k.nu * (k.nu + 1.0) * k.theta * k.theta};
}

// Gaussian weights: every moment is a polynomial in sigma and E s, E s^2.
class GaussianWeightsExpectation final : public ModularExpectation {
 public:
  GaussianWeightsExpectation(Eigen::Index m, TextureMoments tau)
      : ModularExpectation(m),
        mean_s_(static_cast<double>(m) * tau.first),
        mean_s2_(static_cast<double>(m) * static_cast<double>(m + 1) * tau.second) {}

  double mean_psi2(double sigma) const override { return sigma * mean_s_; }

  ModularMoments moments(double sigma) const override {
    ModularMoments mo;
    mo.psi2 = sigma * mean_s_;
    mo.psi2_sq = sigma * sigma * mean_s2_;
    mo.x_dpsi2 = sigma * mean_s_;
    mo.psi1_sq = sigma * mean_s_;
    mo.u1 = 1.0;
    mo.dpsi1 = 1.0;
    mo.r_du1 = 0.0;
    mo.x2_du2 = 0.0;
    return mo;
  }

  std::optional<double> exact_sigma() const override {
    return static_cast<double>(dim()) / mean_s_;
  }
  bool is_exact() const override { return true; }

 private:
  double mean_s_;
  double mean_s2_;
};

// Student-t weights on Student-t data with the same d. At sigma = 1,
// b = s / (d + s) ~ Beta(m, d) and every moment is a Beta moment.
class MatchedStudentExpectation final : public ModularExpectation {
 public:
  MatchedStudentExpectation(Eigen::Index m, double d) : ModularExpectation(m), d_(d) {}

  double mean_psi2(double sigma) const override {
    require_unit(sigma);
    return static_cast<double>(dim());
  }

  ModularMoments moments(double sigma) const override {
    require_unit(sigma);
    const double m = static_cast<double>(dim());
    const double c = d_ + m;
    const double eb = m / c;
    const double eb2 = m * (m + 1.0) / (c * (c + 1.0));
    const double eb1mb = m * d_ / (c * (c + 1.0));
    ModularMoments mo;
    mo.psi2 = c * eb;
    mo.psi2_sq = c * c * eb2;
    mo.x_dpsi2 = c * eb1mb;
    mo.psi1_sq = c * c / d_ * eb1mb;
    mo.u1 = c / d_ * (1.0 - eb);
    mo.dpsi1 = c / d_ * (1.0 - 3.0 * eb + 2.0 * eb2);
    mo.r_du1 = -2.0 * c / d_ * eb1mb;
    mo.x2_du2 = -c * eb2;
    return mo;
  }

  std::optional<double> exact_sigma() const override { return 1.0; }
  bool is_exact() const override { return true; }

 private:
  static void require_unit(double sigma) {
    if (sigma != 1.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "closed-form Student-t moments exist only at sigma = 1");
    }
  }

  double d_;
};

}  // namespace

std::unique_ptr<ModularExpectation> make_expectation(const Family& family, Eigen::Index m,
                                                     const WeightFamily& w,
                                                     const ExpectationEngine& engine) {
  validate(family);
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "expectation: m must be >= 1");
  if (const auto* mc = std::get_if<MonteCarloEngine>(&engine)) {
    if (mc->samples < MonteCarloEngine::kMinSamples) {
      throw Error(ErrorKind::kInvalidArgument, "Monte Carlo engine needs at least 1e4 samples");
    }
    return std::make_unique<MonteCarloExpectation>(family, m, w, *mc);
  }
  if (w.is_gaussian()) {
    const auto tau = texture_moments(family);
    if (!tau) {
      throw Error(ErrorKind::kInvalidArgument,
                  "closed form unavailable: texture second moment is infinite");
    }
    return std::make_unique<GaussianWeightsExpectation>(m, *tau);
  }
  const auto& tw = std::get<WeightFamily::StudentT>(w.kind());
  const auto* td = std::get_if<StudentTFamily>(&family);
  if (td == nullptr || td->d != tw.d || tw.m != m) {
    throw Error(ErrorKind::kInvalidArgument,
                "closed form unavailable for " + describe(family) + " data with " +
                    w.describe() + " weights; use the Monte Carlo engine");
  }
  return std::make_unique<MatchedStudentExpectation>(m, td->d);
}

double solve_sigma(const ModularExpectation& expectation) {
  constexpr double kLo = 1e-6;
  constexpr double kHi = 1e6;
  const double target = static_cast<double>(expectation.dim());
  if (auto exact = expectation.exact_sigma()) {
    if (!(*exact >= kLo && *exact <= kHi)) {
      std::ostringstream msg;
      msg << "scale sigma = " << *exact << " lies outside [" << kLo << ", " << kHi << "]";
      throw Error(ErrorKind::kUnsolvableScale, msg.str());
    }
    const double residual = std::abs(expectation.mean_psi2(*exact) - target);
    if (!(residual < 1e-10 * target)) {
      throw Error(ErrorKind::kInternalConsistency, "closed-form sigma fails the scale equation");
    }
    return *exact;
  }

  auto g = [&](double sigma) { return expectation.mean_psi2(sigma) - target; };

  double lo = 1.0;
  double hi = 1.0;
  double g_lo = g(lo);
  double g_hi = g_lo;
  while (g_lo > 0.0 && lo > kLo) {
    hi = lo;
    g_hi = g_lo;
    lo = std::max(kLo, lo / 10.0);
    g_lo = g(lo);
  }
  while (g_hi < 0.0 && hi < kHi) {
    lo = hi;
    g_lo = g_hi;
    hi = std::min(kHi, hi * 10.0);
    g_hi = g(hi);
  }
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  if (!(g_lo < 0.0 && g_hi > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change of E[psi2(sigma |zeta|^2)] - m on [" << kLo << ", " << kHi
        << "]; sup psi2 may not exceed m";
    throw Error(ErrorKind::kUnsolvableScale, msg.str());
  }
  while (hi / lo - 1.0 > 1e-10) {
    const double mid = std::sqrt(lo * hi);
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    (g_mid < 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double solve_sigma(const Family& family, Eigen::Index m, const WeightFamily& w,
                   const ExpectationEngine& engine) {
  return solve_sigma(*make_expectation(family, m, w, engine));
}

AsymptoticConstants compute_constants(const ModularExpectation& expectation, double sigma) {
  const double m = static_cast<double>(expectation.dim());
  const ModularMoments mo = expectation.moments(sigma);
  AsymptoticConstants c;
  c.alpha = mo.psi1_sq / m;
  c.beta = (1.0 - 1.0 / (2.0 * m)) * mo.u1 + mo.dpsi1 / (2.0 * m);
  c.a1 = mo.psi2_sq / (m * (m + 1.0));
  c.a2 = mo.x_dpsi2 / m;
  if (!(c.beta > 0.0)) {
    std::ostringstream msg;
    msg << "beta = " << c.beta << " <= 0: E[psi1'(sqrt(sigma)|zeta|)] > 0 is violated";
    throw Error(ErrorKind::kHypothesisViolation, msg.str());
  }
  return c;
}

AsymptoticConstants compute_constants(const Family& family, Eigen::Index m,
                                      const WeightFamily& w, double sigma,
                                      const ExpectationEngine& engine) {
  return compute_constants(*make_expectation(family, m, w, engine), sigma);
}

AsymptoticCovariances build_covariances(const HermitianPD& scatter, double sigma,
                                        const AsymptoticConstants& c) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::kInvalidArgument, "build_covariances: sigma must be finite and > 0");
  }
  if (!std::isfinite(c.alpha) || !std::isfinite(c.beta) || !std::isfinite(c.a1) ||
      !std::isfinite(c.a2)) {
    throw Error(ErrorKind::kInvalidArgument, "build_covariances: non-finite constant");
  }
  if (!(c.beta > 0.0)) throw Error(ErrorKind::kHypothesisViolation, "build_covariances: beta <= 0");
  if (c.a2 == 0.0) throw Error(ErrorKind::kInvalidArgument, "build_covariances: a2 = 0");

  const Eigen::Index m = scatter.dim();
  const double md = static_cast<double>(m);
  AsymptoticCovariances out;
  out.sigma = sigma;
  out.alpha = c.alpha;
  out.beta = c.beta;
  out.a1 = c.a1;
  out.a2 = c.a2;
  out.sigma1 = c.a1 * (md + 1.0) * (md + 1.0) / ((c.a2 + md) * (c.a2 + md));
  out.sigma2 = ((c.a1 - 1.0) - c.a1 * (c.a2 - 1.0) * (md + (md + 2.0) * c.a2) /
                                   ((c.a2 + md) * (c.a2 + md))) /
               (c.a2 * c.a2);
  out.M_e = scatter.matrix() / sigma;
  out.Sigma_t = (c.alpha / (c.beta * c.beta)) * out.M_e;

  const ComplexVector v = vec(out.M_e);
  out.Sigma_M = out.sigma1 * kron(out.M_e.transpose(), out.M_e) + out.sigma2 * (v * v.adjoint());
  out.Omega_M = CommutationMatrix(m).right_multiply(out.Sigma_M);

  const double asym = (out.Sigma_M - out.Sigma_M.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(out.Sigma_M, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale || eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    std::ostringstream msg;
    msg << "Sigma_M is not Hermitian PSD (min eigenvalue " << eig.eigenvalues().minCoeff() << ")";
    throw Error(ErrorKind::kInternalConsistency, msg.str());
  }
  return out;
}

AsymptoticCovariances asymptotic_covariances(const CESModel& model, const WeightFamily& w,
                                             const ExpectationEngine& engine) {
  const auto expectation = make_expectation(model.family(), model.dim(), w, engine);
  const double sigma = solve_sigma(*expectation);
  return build_covariances(model.scatter(), sigma, compute_constants(*expectation, sigma));
}

}  // namespace cesm
