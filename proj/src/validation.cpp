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


#include "cesm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cesm/detail/real_estimator.hpp"
#include "cesm/error.hpp"
#include "cesm/parallel.hpp"
#include "cesm/rng.hpp"

namespace cesm {

void ExperimentConfig::validate() const {
  if (sample_sizes.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "experiment: no sample sizes");
  }
  for (std::size_t n : sample_sizes) {
    if (static_cast<Eigen::Index>(n) <= model.dim()) {
      throw Error(ErrorKind::kInvalidArgument, "experiment: every N must exceed m");
    }
  }
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "experiment: trials must be >= 1");
  solver.validate();
}

std::vector<std::size_t> reference_grid() {
  return {5, 6, 8, 10, 12, 15, 18, 22, 28, 34, 42, 53, 65, 81, 100};
}

ComplexVector scenario_location() {
  ComplexVector t(3);
  t << Complex(1.0, 0.5), Complex(2.0, 1.0), Complex(3.0, 1.5);
  return t;
}

CESModel student_t_scenario() {
  return CESModel(scenario_location(), HermitianPD::identity(3), StudentTFamily{4.0});
}

CESModel k_scenario() {
  return CESModel(scenario_location(), HermitianPD::identity(3), KFamily{4.0, 0.25});
}

bool CheckReport::passed() const {
  return std::all_of(lines.begin(), lines.end(),
                     [](const CheckLine& l) { return !l.gating || l.passed; });
}

void CheckReport::add(std::string quantity, double measured, double bound, bool gating) {
  lines.push_back({std::move(quantity), measured, bound, measured < bound, gating});
}

namespace {

struct TrialOutcome {
  bool ok = false;
  ComplexVector dt;  // t - t_e
  ComplexVector dm;  // vec(M - M_e)
};

std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg, std::size_t n,
                                     std::size_t trials, const ComplexMatrix& m_e) {
  std::vector<TrialOutcome> out(trials);
  parallel_for(trials, cfg.threads, [&](std::size_t trial) {
    const std::uint64_t seed = derive_seed(cfg.seed, {n, trial});
    const ComplexMatrix z = sample_ces(cfg.model, n, seed);
    try {
      const JointEstimate est = joint_m_estimate(z, cfg.weights, cfg.solver);
      if (!est.converged) return;
      out[trial].ok = true;
      out[trial].dt = est.location - cfg.model.location();
      out[trial].dm = vec(est.scatter.matrix() - m_e);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kSingularScatter && e.kind() != ErrorKind::kDegenerateWeights) {
        throw;
      }
    }
  });
  return out;
}

// Mean of x x^H (conjugate) or x x^T over successful trials, scaled by `scale`,
// with per-entry standard errors of the mean.
struct SecondMoment {
  ComplexMatrix mean;
  RealMatrix std_error;
};

SecondMoment second_moment(const std::vector<TrialOutcome>& outcomes,
                           ComplexVector TrialOutcome::*field, double scale, bool conjugate) {
  Eigen::Index dim = 0;
  for (const auto& o : outcomes) {
    if (o.ok) {
      dim = (o.*field).size();
      break;
    }
  }
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  RealMatrix sum_sq = RealMatrix::Zero(dim, dim);
  double count = 0.0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    const ComplexVector& x = o.*field;
    const ComplexMatrix p = scale * (conjugate ? ComplexMatrix(x * x.adjoint())
                                               : ComplexMatrix(x * x.transpose()));
    sum += p;
    sum_sq += p.cwiseAbs2();
    count += 1.0;
  }
  if (count < 2.0) throw Error(ErrorKind::kExperimentFailure, "fewer than two converged trials");
  SecondMoment out;
  out.mean = sum / count;
  const RealMatrix var = (sum_sq / count - out.mean.cwiseAbs2()).cwiseMax(0.0);
  out.std_error = (var / count).cwiseSqrt();
  return out;
}

std::size_t failures(const std::vector<TrialOutcome>& outcomes) {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return !o.ok; }));
}

void enforce_failure_rate(std::size_t failed, std::size_t trials, std::size_t n,
                          std::vector<std::string>* warnings) {
  const double rate = static_cast<double>(failed) / static_cast<double>(trials);
  std::ostringstream msg;
  msg << failed << " of " << trials << " trials failed to converge at N=" << n;
  if (rate > 0.10) throw Error(ErrorKind::kExperimentFailure, msg.str());
  if (rate > 0.01 && warnings != nullptr) warnings->push_back(msg.str());
}

}  // namespace

MseCurve run_mse_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const AsymptoticCovariances theory = asymptotic_covariances(cfg.model, cfg.weights, cfg.engine);
  MseCurve curve;
  for (std::size_t n : cfg.sample_sizes) {
    const auto outcomes = run_trials(cfg, n, cfg.trials, theory.M_e);
    MsePoint point;
    point.N = n;
    point.trials = cfg.trials;
    point.failures = failures(outcomes);
    enforce_failure_rate(point.failures, cfg.trials, n, &curve.warnings);
    double sum_t = 0.0;
    double sum_m = 0.0;
    for (const auto& o : outcomes) {
      if (!o.ok) continue;
      sum_t += o.dt.squaredNorm();
      sum_m += o.dm.squaredNorm();
    }
    const double ok = static_cast<double>(cfg.trials - point.failures);
    point.mse_t_emp = ok > 0.0 ? sum_t / ok : 0.0;
    point.mse_M_emp = ok > 0.0 ? sum_m / ok : 0.0;
    point.mse_t_theory = theory.trace_Sigma_t() / static_cast<double>(n);
    point.mse_M_theory = theory.trace_Sigma_M() / static_cast<double>(n);
    curve.points.push_back(point);
  }
  return curve;
}

CheckReport check_location_circularity(const ExperimentConfig& cfg, std::size_t n,
                                       std::size_t trials) {
  cfg.validate();
  const AsymptoticCovariances theory = asymptotic_covariances(cfg.model, cfg.weights, cfg.engine);
  const auto outcomes = run_trials(cfg, n, trials, theory.M_e);
  enforce_failure_rate(failures(outcomes), trials, n, nullptr);
  const double scale = static_cast<double>(n);

  CheckReport report;
  report.name = "location-circularity";
  const SecondMoment pseudo = second_moment(outcomes, &TrialOutcome::dt, scale, false);
  report.add("max |pseudo-covariance entry| / standard error",
             (pseudo.mean.cwiseAbs().array() / pseudo.std_error.array()).maxCoeff(), 5.0);
  const SecondMoment cov = second_moment(outcomes, &TrialOutcome::dt, scale, true);
  report.add("|N Cov(t) - Sigma_t|_F / |Sigma_t|_F",
             (cov.mean - theory.Sigma_t).norm() / theory.Sigma_t.norm(), 0.05);
  return report;
}

CheckReport check_scatter_pseudo_structure(const ExperimentConfig& cfg, std::size_t n,
                                           std::size_t trials) {
  cfg.validate();
  const AsymptoticCovariances theory = asymptotic_covariances(cfg.model, cfg.weights, cfg.engine);
  const auto outcomes = run_trials(cfg, n, trials, theory.M_e);
  enforce_failure_rate(failures(outcomes), trials, n, nullptr);
  const double scale = static_cast<double>(n);

  CheckReport report;
  report.name = "scatter-pseudo-structure";
  const SecondMoment cov = second_moment(outcomes, &TrialOutcome::dm, scale, true);
  report.add("|N Cov(vec M) - Sigma_M|_F / |Sigma_M|_F",
             (cov.mean - theory.Sigma_M).norm() / theory.Sigma_M.norm(), 0.10);
  const SecondMoment pseudo = second_moment(outcomes, &TrialOutcome::dm, scale, false);
  report.add("|N PCov(vec M) - Sigma_M K_m|_F / |Sigma_M K_m|_F",
             (pseudo.mean - theory.Omega_M).norm() / theory.Omega_M.norm(), 0.10);
  report.add("tr(N Cov(vec M)) / tr(Sigma_M) - 1 (abs)",
             std::abs(cov.mean.real().trace() / theory.trace_Sigma_M() - 1.0), 0.10, false);
  return report;
}

namespace {

// Running sums for the appendix quantities over a block of samples.
struct AppendixSums {
  explicit AppendixSums(Eigen::Index p)
      : a(RealMatrix::Zero(p * p, p * p)),
        b(RealMatrix::Zero(p * p, p)),
        c(RealMatrix::Zero(p, p * p)),
        d(RealMatrix::Zero(p, p)),
        cross(RealMatrix::Zero(p * p, p)),
        cross_sq(RealMatrix::Zero(p * p, p)),
        kappa2(RealMatrix::Zero(p, p)),
        kappa3(RealMatrix::Zero(p * p, p)) {}

  RealMatrix a, b, c, d, cross, cross_sq, kappa2, kappa3;
  double b_norm_sq = 0.0;
  double c_norm_sq = 0.0;

  void merge(const AppendixSums& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    cross += o.cross;
    cross_sq += o.cross_sq;
    kappa2 += o.kappa2;
    kappa3 += o.kappa3;
    b_norm_sq += o.b_norm_sq;
    c_norm_sq += o.c_norm_sq;
  }
};

}  // namespace

CheckReport check_appendix_limits(const Family& family, Eigen::Index m, const WeightFamily& w,
                                  std::size_t n_samples, std::uint64_t seed,
                                  const ExpectationEngine& engine, unsigned threads) {
  if (n_samples < 2) throw Error(ErrorKind::kInvalidArgument, "appendix: need n >= 2");
  const Eigen::Index p = 2 * m;
  const double pd = static_cast<double>(p);
  const auto expectation = make_expectation(family, m, w, engine);
  const double sigma = solve_sigma(*expectation);
  const ModularMoments mo = expectation->moments(sigma);

  // Closed forms.
  const RealMatrix eye_p2 = RealMatrix::Identity(p * p, p * p);
  const RealVector vec_ip = vec(RealMatrix::Identity(p, p));
  const RealMatrix k_p = CommutationMatrix(p).right_multiply(eye_p2);
  const RealMatrix a_closed =
      eye_p2 + (2.0 * mo.x2_du2 / (pd * (pd + 2.0))) * (eye_p2 + k_p + vec_ip * vec_ip.transpose());
  const RealMatrix d_closed = (mo.u1 + mo.r_du1 / pd) * RealMatrix::Identity(p, p);

  // Real-mapped standardized draws k_n = M_R^{-1/2}(h(z_n) - h(t_e)), M_R = f(M_e).
  const CESModel model = CESModel::standard(m, family);
  const ComplexMatrix m_e = model.scatter().matrix() / sigma;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(iso_f(m_e));
  const RealMatrix m_r_inv_sqrt = eig.operatorInverseSqrt();
  const ComplexMatrix z = sample_ces(model, n_samples, seed, threads);
  const RealVector t_r = iso_h(model.location());

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<AppendixSums> partial(blocks, AppendixSums(p));
  parallel_for(blocks, threads, [&](std::size_t blk) {
    AppendixSums& acc = partial[blk];
    const std::size_t begin = blk * kBlock;
    const std::size_t end = std::min(n_samples, begin + kBlock);
    const Eigen::Index len = static_cast<Eigen::Index>(end - begin);
    RealMatrix kk(p * p, len);
    RealVector b_weights(len);
    for (std::size_t j = begin; j < end; ++j) {
      const RealVector k = m_r_inv_sqrt * (iso_h(z.col(static_cast<Eigen::Index>(j))) - t_r);
      const double norm2 = k.squaredNorm();
      const double norm = std::sqrt(norm2);
      // u2R(s) = u2(s/2), u1R(r) = u1(r/sqrt(2)) and their derivatives.
      const double an = w.u2(0.5 * norm2);
      const double bn = -0.5 * w.du2(0.5 * norm2);
      const double cn = w.u1(norm * inv_sqrt2);
      const double dn = -inv_sqrt2 * w.du1(norm * inv_sqrt2);
      const RealMatrix kkt = k * k.transpose();
      const RealVector kron_kk = vec(kkt);  // k (x) k

      const Eigen::Index col = static_cast<Eigen::Index>(j - begin);
      kk.col(col) = kron_kk;
      b_weights(col) = bn;

      const RealMatrix x = an * RealMatrix::Identity(p, p) - bn * kkt;
      for (Eigen::Index i = 0; i < p; ++i) acc.b.middleRows(i * p, p) += k(i) * x;
      acc.b_norm_sq += norm2 * x.squaredNorm();

      const double cscale = -dn / (2.0 * norm);
      for (Eigen::Index i = 0; i < p; ++i) acc.c.middleCols(i * p, p) += (cscale * k(i)) * kkt;
      acc.c_norm_sq += cscale * cscale * norm2 * norm2 * norm2;

      acc.d += cn * RealMatrix::Identity(p, p) - (dn / norm) * kkt;

      const RealMatrix xi = (an * kron_kk - vec_ip) * (cn * k).transpose();
      acc.cross += xi;
      acc.cross_sq += xi.cwiseAbs2();

      const RealVector kappa = k / norm;
      const RealMatrix kappa_kt = kappa * kappa.transpose();
      acc.kappa2 += kappa_kt;
      acc.kappa3 += vec(kappa_kt) * kappa.transpose();
    }
    acc.a.noalias() += kk * b_weights.asDiagonal() * kk.transpose();
  });
  AppendixSums total(p);
  for (const auto& part : partial) total.merge(part);

  const double n = static_cast<double>(n_samples);
  const double root_n = std::sqrt(n);
  const RealMatrix a_n = eye_p2 - total.a / n;
  const RealMatrix b_n = total.b / n;
  const RealMatrix c_n = -(total.c / n);  // C_N carries a leading minus sign
  const RealMatrix d_n = total.d / n;
  const RealMatrix cross_mean = total.cross / n;
  const RealMatrix cross_se =
      ((total.cross_sq / n - cross_mean.cwiseAbs2()).cwiseMax(0.0) / n).cwiseSqrt();

  CheckReport report;
  report.name = "appendix-limits";
  report.add("|A_N - A|_F / |A|_F", (a_n - a_closed).norm() / a_closed.norm(), 0.02);
  report.add("|B_N|_F", b_n.norm(), 5.0 / root_n);
  report.add("|C_N|_F", c_n.norm(), 5.0 / root_n);
  report.add("|D_N - D|_F / |D|_F", (d_n - d_closed).norm() / d_closed.norm(), 0.02);
  report.add("max |E[omega chi^T] entry| / standard error",
             (cross_mean.array().abs() / cross_se.array().max(1e-300)).maxCoeff(), 5.0);
  report.add("max |E[kappa kappa^T] - I/p|",
             (total.kappa2 / n - RealMatrix::Identity(p, p) / pd).cwiseAbs().maxCoeff(),
             5.0 / root_n);
  report.add("max |third moment of kappa|", (total.kappa3 / n).cwiseAbs().maxCoeff(),
             5.0 / root_n);
  // Scale-aware view of the B_N and C_N limits: |X_N|_F in units of its own
  // root-mean-square standard error.
  report.add("|B_N|_F / sqrt(E|B_1|_F^2 / n)", b_n.norm() / std::sqrt(total.b_norm_sq / n / n),
             5.0, false);
  if (total.c_norm_sq > 0.0) {
    report.add("|C_N|_F / sqrt(E|C_1|_F^2 / n)", c_n.norm() / std::sqrt(total.c_norm_sq / n / n),
               5.0, false);
  }
  return report;
}

CheckReport check_p_symmetry(const ComplexMatrix& samples, const WeightFamily& w,
                             const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index m = samples.rows();
  const Eigen::Index n = samples.cols();
  RealMatrix u(2 * m, n);
  for (Eigen::Index j = 0; j < n; ++j) u.col(j) = iso_h(samples.col(j));
  const RealMatrix p = iso_P(m);
  const RealMatrix v = p * u;

  // Both fits start from the sample mean / covariance of u, mapped by P for v.
  const RealVector t0 = u.rowwise().mean();
  const RealMatrix centered = u.colwise() - t0;
  const RealMatrix m0 = centered * centered.transpose() / static_cast<double>(n);
  const auto fit_u =
      detail::real_joint_m_estimate(u, w, cfg.tol, cfg.max_iter, std::make_pair(t0, m0));
  const auto fit_v = detail::real_joint_m_estimate(
      v, w, cfg.tol, cfg.max_iter,
      std::make_pair(RealVector(p * t0), RealMatrix(p * m0 * p.transpose())));

  CheckReport report;
  report.name = "p-symmetry";
  const double t_scale = std::max(fit_u.location.norm(), std::sqrt(fit_u.scatter.trace()));
  report.add("|t_v - P t_u| / scale", (fit_v.location - p * fit_u.location).norm() / t_scale,
             1e-10);
  report.add("|M_v - P M_u P^T|_F / |M_u|_F",
             (fit_v.scatter - p * fit_u.scatter * p.transpose()).norm() / fit_u.scatter.norm(),
             1e-10);
  report.add("u fit not converged", fit_u.converged ? 0.0 : 1.0, 0.5);
  report.add("v fit not converged", fit_v.converged ? 0.0 : 1.0, 0.5);
  return report;
}

}  // namespace cesm
