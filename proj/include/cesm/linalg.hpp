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


#ifndef CESM_LINALG_HPP
#define CESM_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <unsupported/Eigen/KroneckerProduct>

namespace cesm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// True when every real and imaginary part is finite.
template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& a) {
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    return a.derived().real().allFinite() && a.derived().imag().allFinite();
  } else {
    return a.allFinite();
  }
}

/// Hermitian positive-definite matrix. Only the lower triangle of the input is
/// read; the upper triangle is its conjugate mirror, so the stored matrix is
/// exactly Hermitian. Construction fails unless the smallest eigenvalue
/// exceeds 1e-12 times the largest.
class HermitianPD {
 public:
  static constexpr double kRelativeEigenFloor = 1e-12;

  explicit HermitianPD(const ComplexMatrix& a);

  static HermitianPD identity(Eigen::Index m);

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

  ComplexMatrix inverse() const;
  /// Unique Hermitian PD square root.
  ComplexMatrix sqrt() const;
  ComplexMatrix inverse_sqrt() const;

  /// Solves M x = b through the Cholesky factor.
  ComplexVector solve(const ComplexVector& b) const;

  double trace() const { return matrix_.real().trace(); }

 private:
  ComplexMatrix spectral(double (*fn)(double)) const;

  ComplexMatrix matrix_;
  RealVector eigenvalues_;
  ComplexMatrix eigenvectors_;
  Eigen::LLT<ComplexMatrix> llt_;
};

/// Real symmetric matrix; symmetrized from the lower triangle on construction.
class RealSymmetric {
 public:
  explicit RealSymmetric(const RealMatrix& a);

  Eigen::Index dim() const { return matrix_.rows(); }
  const RealMatrix& matrix() const { return matrix_; }

 private:
  RealMatrix matrix_;
};

/// Column-major stacking: vec(A)[i + rows * j] = A(i, j).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec(
    const Eigen::MatrixBase<Derived>& a) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> dense = a;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(
      dense.data(), dense.size());
}

/// Inverse of vec for a square m x m matrix.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> unvec(
    const Eigen::MatrixBase<Derived>& v, Eigen::Index m) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> dense = v;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                                        Eigen::Dynamic>>(dense.data(), m, m);
}

template <class DerivedA, class DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::kroneckerProduct(a.template cast<Scalar>().eval(),
                              b.template cast<Scalar>().eval());
  return out;
}

/// The commutation matrix K_m, kept as an index map. K_m vec(A) = vec(A^T).
class CommutationMatrix {
 public:
  static constexpr Eigen::Index kMaxDenseDim = 8;

  explicit CommutationMatrix(Eigen::Index m);

  Eigen::Index dim() const { return m_; }
  Eigen::Index size() const { return m_ * m_; }

  /// Row r of K_m has its single 1 in column source(r).
  Eigen::Index source(Eigen::Index r) const { return map_[static_cast<std::size_t>(r)]; }

  /// K_m x.
  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply(
      const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(size());
    for (Eigen::Index r = 0; r < size(); ++r) out(r) = x(source(r));
    return out;
  }

  /// A K_m. K_m is symmetric, so column c of the product is column source(c) of A.
  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> right_multiply(
      const Eigen::MatrixBase<Derived>& a) const {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows(),
                                                                                size());
    for (Eigen::Index c = 0; c < size(); ++c) out.col(c) = a.col(source(c));
    return out;
  }

  /// Dense 0/1 form; only available for m <= kMaxDenseDim.
  RealMatrix to_dense() const;

 private:
  Eigen::Index m_;
  std::vector<Eigen::Index> map_;
};

/// d^2(z, t; M) = (z - t)^H M^{-1} (z - t), computed through the Cholesky
/// factor of M.
double mahalanobis_sq(const ComplexVector& z, const ComplexVector& t, const HermitianPD& m);

// Complex <-> real isomorphism.

/// h(a) = (Re(a)^T, Im(a)^T)^T.
RealVector iso_h(const ComplexVector& a);
/// Inverse of iso_h.
ComplexVector iso_h_inverse(const RealVector& u);
/// f(A) = 1/2 [[Re A, -Im A], [Im A, Re A]].
RealMatrix iso_f(const ComplexMatrix& a);
/// Inverse of iso_f on its range.
ComplexMatrix iso_f_inverse(const RealMatrix& r);
/// P = [[0, -I_m], [I_m, 0]], so that P h(z) = h(i z).
RealMatrix iso_P(Eigen::Index m);

}  // namespace cesm

#endif  // CESM_LINALG_HPP
