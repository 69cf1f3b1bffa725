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


#ifndef CESM_DETAIL_REWEIGHTING_HPP
#define CESM_DETAIL_REWEIGHTING_HPP

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "cesm/error.hpp"

namespace cesm::detail {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr Eigen::Index kPairwiseLeaf = 32;

/// Pairwise sum of w_j * R.col(j) over [begin, end).
template <class Scalar>
Vec<Scalar> weighted_column_sum(const Mat<Scalar>& r, const Eigen::VectorXd& w,
                                Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index len = end - begin;
  if (len <= kPairwiseLeaf) {
    return r.middleCols(begin, len) * w.segment(begin, len).template cast<Scalar>();
  }
  const Eigen::Index mid = begin + len / 2;
  return weighted_column_sum<Scalar>(r, w, begin, mid) + weighted_column_sum<Scalar>(r, w, mid, end);
}

/// Pairwise sum of w_j * R.col(j) R.col(j)^H over [begin, end).
template <class Scalar>
Mat<Scalar> weighted_outer_sum(const Mat<Scalar>& r, const Eigen::VectorXd& w, Eigen::Index begin,
                               Eigen::Index end) {
  const Eigen::Index len = end - begin;
  if (len <= kPairwiseLeaf) {
    const auto block = r.middleCols(begin, len);
    return block * w.segment(begin, len).template cast<Scalar>().asDiagonal() * block.adjoint();
  }
  const Eigen::Index mid = begin + len / 2;
  return weighted_outer_sum<Scalar>(r, w, begin, mid) + weighted_outer_sum<Scalar>(r, w, mid, end);
}

inline double pairwise_sum(const Eigen::VectorXd& w, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index len = end - begin;
  if (len <= kPairwiseLeaf) return w.segment(begin, len).sum();
  const Eigen::Index mid = begin + len / 2;
  return pairwise_sum(w, begin, mid) + pairwise_sum(w, mid, end);
}

template <class Scalar>
Mat<Scalar> hermitize(const Mat<Scalar>& a) {
  return (0.5 * (a + a.adjoint())).eval();
}

/// Squared Mahalanobis distances of the columns of R under scatter M.
template <class Scalar>
Eigen::VectorXd distances_sq(const Mat<Scalar>& r, const Mat<Scalar>& m) {
  Eigen::LLT<Mat<Scalar>> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularScatter, "scatter lost positive definiteness");
  }
  const Mat<Scalar> y = llt.matrixL().solve(r);
  return y.colwise().squaredNorm().transpose();
}

template <class Scalar>
void require_well_conditioned(const Mat<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (eig.info() != Eigen::Success || !(hi > 0.0) || !(lo >= 1e-12 * hi)) {
    std::ostringstream msg;
    msg << "scatter update is singular (eigenvalues in [" << lo << ", " << hi << "])";
    throw Error(ErrorKind::kSingularScatter, msg.str());
  }
}

struct Residuals {
  double location;
  double scatter;
};

/// Scaled residual norms of the estimating equations at (t, M):
/// location: |mean_n u1(d_n)(z_n - t)| / (mean_n u1(d_n) sqrt(tr M)),
/// scatter:  |mean_n u2(d_n^2)(z_n - t)(z_n - t)^H - M|_F / |M|_F.
template <class Scalar, class LocWeight, class ScatterWeight>
Residuals evaluate_residuals(const Mat<Scalar>& z, const Vec<Scalar>& t, const Mat<Scalar>& m,
                             LocWeight&& loc_weight, ScatterWeight&& scatter_weight) {
  const Eigen::Index n = z.cols();
  const Mat<Scalar> r = z.colwise() - t;
  const Eigen::VectorXd d2 = distances_sq<Scalar>(r, m);
  const Eigen::VectorXd w1 = d2.unaryExpr(loc_weight);
  const Eigen::VectorXd w2 = d2.unaryExpr(scatter_weight);
  const double sum_w1 = pairwise_sum(w1, 0, n);
  if (!(sum_w1 > 0.0)) {
    throw Error(ErrorKind::kDegenerateWeights, "location weights sum to zero");
  }
  const double scale = std::sqrt(std::real(m.trace()));
  const Vec<Scalar> eq_t = weighted_column_sum<Scalar>(r, w1, 0, n);
  const Mat<Scalar> h = weighted_outer_sum<Scalar>(r, w2, 0, n) / static_cast<double>(n);
  return {eq_t.norm() / (sum_w1 * scale), (h - m).norm() / m.norm()};
}

template <class Scalar>
struct SolveResult {
  Vec<Scalar> location;
  Mat<Scalar> scatter;
  int iterations = 0;
  Residuals residuals{0.0, 0.0};
  bool converged = false;
  std::vector<double> scatter_change;
};

/// Reweighting fixed-point iteration. Both weight callables take the squared
/// distance d^2. Each sweep updates t with the previous M, then M with the new t.
template <class Scalar, class LocWeight, class ScatterWeight>
SolveResult<Scalar> reweighting_solve(const Mat<Scalar>& z, Vec<Scalar> t, Mat<Scalar> m,
                                      LocWeight&& loc_weight, ScatterWeight&& scatter_weight,
                                      double tol, int max_iter) {
  const Eigen::Index n = z.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  SolveResult<Scalar> out;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    Mat<Scalar> r = z.colwise() - t;
    Eigen::VectorXd w = distances_sq<Scalar>(r, m).unaryExpr(loc_weight);
    const double sum_w1 = pairwise_sum(w, 0, n);
    if (!(sum_w1 > 0.0)) {
      throw Error(ErrorKind::kDegenerateWeights, "location weights sum to zero");
    }
    const Vec<Scalar> t_next = weighted_column_sum<Scalar>(z, w, 0, n) / sum_w1;

    r = z.colwise() - t_next;
    w = distances_sq<Scalar>(r, m).unaryExpr(scatter_weight);
    const Mat<Scalar> m_next = hermitize<Scalar>(weighted_outer_sum<Scalar>(r, w, 0, n) * inv_n);
    require_well_conditioned<Scalar>(m_next);

    const double scale = std::sqrt(std::real(m_next.trace()));
    const double change_t = (t_next - t).norm() / scale;
    const double change_m = (m_next - m).norm() / m_next.norm();
    out.scatter_change.push_back(change_m);
    t = t_next;
    m = m_next;
    out.iterations = sweep;

    if (change_t < tol && change_m < tol) {
      out.residuals = evaluate_residuals<Scalar>(z, t, m, loc_weight, scatter_weight);
      if (out.residuals.location <= 10.0 * tol && out.residuals.scatter <= 10.0 * tol) {
        out.converged = true;
        break;
      }
    }
  }
  if (!out.converged) {
    out.residuals = evaluate_residuals<Scalar>(z, t, m, loc_weight, scatter_weight);
  }
  out.location = std::move(t);
  out.scatter = std::move(m);
  return out;
}

}  // namespace cesm::detail

#endif  // CESM_DETAIL_REWEIGHTING_HPP
