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


#include "cesm/linalg.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cesm/error.hpp"

namespace cesm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kNotPositiveDefinite: return "not positive definite";
    case ErrorKind::kRankDeficient: return "rank deficient";
    case ErrorKind::kDegenerateWeights: return "degenerate weights";
    case ErrorKind::kSingularScatter: return "singular scatter";
    case ErrorKind::kUnsolvableScale: return "unsolvable scale equation";
    case ErrorKind::kHypothesisViolation: return "hypothesis violation";
    case ErrorKind::kDerivativeMismatch: return "derivative mismatch";
    case ErrorKind::kInternalConsistency: return "internal consistency";
    case ErrorKind::kExperimentFailure: return "experiment failure";
    case ErrorKind::kParse: return "parse error";
  }
  return "unknown";
}

HermitianPD::HermitianPD(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::kDimensionMismatch, "HermitianPD: matrix must be square and non-empty");
  }
  if (!all_finite(a)) {
    throw Error(ErrorKind::kInvalidArgument, "HermitianPD: non-finite entry");
  }
  const Eigen::Index m = a.rows();
  matrix_.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    matrix_(j, j) = Complex(a(j, j).real(), 0.0);
    for (Eigen::Index i = j + 1; i < m; ++i) {
      matrix_(i, j) = a(i, j);
      matrix_(j, i) = std::conj(a(i, j));
    }
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(matrix_);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "HermitianPD: eigendecomposition failed");
  }
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  const double lo = eigenvalues_.minCoeff();
  const double hi = eigenvalues_.maxCoeff();
  if (!(hi > 0.0) || !(lo > kRelativeEigenFloor * hi)) {
    std::ostringstream msg;
    msg << "HermitianPD: eigenvalue range [" << lo << ", " << hi
        << "] violates the relative floor " << kRelativeEigenFloor;
    throw Error(ErrorKind::kNotPositiveDefinite, msg.str());
  }
  llt_.compute(matrix_);
}

HermitianPD HermitianPD::identity(Eigen::Index m) {
  return HermitianPD(ComplexMatrix::Identity(m, m));
}

ComplexMatrix HermitianPD::spectral(double (*fn)(double)) const {
  const RealVector mapped = eigenvalues_.unaryExpr(fn);
  ComplexMatrix out = eigenvectors_ * mapped.cast<Complex>().asDiagonal() *
                      eigenvectors_.adjoint();
  // Re-impose exact Hermitian symmetry lost to rounding.
  return (0.5 * (out + out.adjoint())).eval();
}

ComplexMatrix HermitianPD::inverse() const {
  return spectral([](double x) { return 1.0 / x; });
}

ComplexMatrix HermitianPD::sqrt() const {
  return spectral([](double x) { return std::sqrt(x); });
}

ComplexMatrix HermitianPD::inverse_sqrt() const {
  return spectral([](double x) { return 1.0 / std::sqrt(x); });
}

ComplexVector HermitianPD::solve(const ComplexVector& b) const {
  if (b.size() != dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "HermitianPD::solve: dimension mismatch");
  }
  return llt_.solve(b);
}

RealSymmetric::RealSymmetric(const RealMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "RealSymmetric: matrix must be square");
  }
  matrix_ = a.triangularView<Eigen::Lower>();
  matrix_.triangularView<Eigen::StrictlyUpper>() = matrix_.transpose();
}

CommutationMatrix::CommutationMatrix(Eigen::Index m) : m_(m) {
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "commutation matrix: m must be >= 1");
  map_.resize(static_cast<std::size_t>(m * m));
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      // vec(A^T)[i + m j] = A(j, i) = vec(A)[j + m i]
      map_[static_cast<std::size_t>(i + m * j)] = j + m * i;
    }
  }
}

RealMatrix CommutationMatrix::to_dense() const {
  if (m_ > kMaxDenseDim) {
    throw Error(ErrorKind::kInvalidArgument,
                "commutation matrix: dense form is limited to m <= 8");
  }
  RealMatrix k = RealMatrix::Zero(size(), size());
  for (Eigen::Index r = 0; r < size(); ++r) k(r, source(r)) = 1.0;
  return k;
}

double mahalanobis_sq(const ComplexVector& z, const ComplexVector& t, const HermitianPD& m) {
  if (z.size() != t.size() || z.size() != m.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "mahalanobis_sq: dimension mismatch");
  }
  const ComplexVector r = z - t;
  const double d2 = r.dot(m.solve(r)).real();
  return d2 > 0.0 ? d2 : 0.0;
}

RealVector iso_h(const ComplexVector& a) {
  const Eigen::Index m = a.size();
  RealVector u(2 * m);
  u.head(m) = a.real();
  u.tail(m) = a.imag();
  return u;
}

ComplexVector iso_h_inverse(const RealVector& u) {
  if (u.size() % 2 != 0) {
    throw Error(ErrorKind::kDimensionMismatch, "iso_h_inverse: odd length");
  }
  const Eigen::Index m = u.size() / 2;
  ComplexVector a(m);
  a.real() = u.head(m);
  a.imag() = u.tail(m);
  return a;
}

RealMatrix iso_f(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::kDimensionMismatch, "iso_f: square input");
  const Eigen::Index m = a.rows();
  RealMatrix r(2 * m, 2 * m);
  r.topLeftCorner(m, m) = 0.5 * a.real();
  r.topRightCorner(m, m) = -0.5 * a.imag();
  r.bottomLeftCorner(m, m) = 0.5 * a.imag();
  r.bottomRightCorner(m, m) = 0.5 * a.real();
  return r;
}

ComplexMatrix iso_f_inverse(const RealMatrix& r) {
  if (r.rows() != r.cols() || r.rows() % 2 != 0) {
    throw Error(ErrorKind::kDimensionMismatch, "iso_f_inverse: expects a 2m x 2m matrix");
  }
  const Eigen::Index m = r.rows() / 2;
  ComplexMatrix a(m, m);
  a.real() = r.topLeftCorner(m, m) + r.bottomRightCorner(m, m);
  a.imag() = r.bottomLeftCorner(m, m) - r.topRightCorner(m, m);
  return a;
}

RealMatrix iso_P(Eigen::Index m) {
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "iso_P: m must be >= 1");
  RealMatrix p = RealMatrix::Zero(2 * m, 2 * m);
  p.topRightCorner(m, m) = -RealMatrix::Identity(m, m);
  p.bottomLeftCorner(m, m) = RealMatrix::Identity(m, m);
  return p;
}

}  // namespace cesm
