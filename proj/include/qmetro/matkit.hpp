// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear-algebra kernel shared by every other module:
// Hermitian eigendecomposition, operator norm, pseudo-inverse restricted to
// the support, partial trace and Kronecker product.
//
// The vectorization convention is fixed globally: |K> = (K (x) I)|I> with
// |I> = sum_i |i>|i>, i.e. vec(K)(i*cols + j) = K(i, j) (row-major), and
// composite indices of bipartite operators read a*dB + b.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "qmetro/errors.hpp"

namespace qmetro {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline const Complex IM{0.0, 1.0};

namespace tol {
// Hermiticity: max entry of |M - M^dag|, scaled by 1 + op_norm(M).
inline constexpr double hermitian = 1e-12;
// PSD admits eigenvalues >= -psd * lambda_max.
inline constexpr double psd = 1e-9;
// Support cutoff of the pseudo-inverse, relative to lambda_max.
inline constexpr double support_cut = 1e-10;
}  // namespace tol

inline CMatrix cidentity(Index d) { return CMatrix::Identity(d, d); }

inline CMatrix pauli(int k) {
  CMatrix s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: fail(errc::bad_parameter, "pauli index must be 1, 2 or 3");
  }
  return s;
}

/// Largest singular value. For Hermitian input this is max |eigenvalue|.
inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return top > 0.0 ? std::sqrt(top) : 0.0;
}

inline double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double scale_tol = tol::hermitian) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return hermiticity_defect(m) <= scale_tol * (1.0 + op_norm(m));
}

struct HermEig {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns match eigenvalues
};

inline HermEig herm_eig(const CMatrix& m) {
  if (m.rows() != m.cols()) fail(errc::dimension_mismatch, "herm_eig needs a square matrix");
  if (!is_hermitian(m)) fail(errc::non_hermitian_input, "herm_eig input fails the Hermiticity check");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint().eval()));
  if (es.info() != Eigen::Success) fail(errc::solver_failure, "Hermitian eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Inverse on the span of eigenvectors with lambda > cutoff * lambda_max,
/// zero on the complement.
inline CMatrix pinv_on_support(const CMatrix& m, double cutoff = tol::support_cut) {
  if (cutoff <= 0.0) fail(errc::bad_parameter, "pinv_on_support cutoff must be positive");
  auto eig = herm_eig(m);
  const double lmax = eig.eigenvalues.size() ? std::max(0.0, eig.eigenvalues.maxCoeff()) : 0.0;
  if (eig.eigenvalues.size() && eig.eigenvalues.minCoeff() < -tol::psd * lmax)
    fail(errc::negative_eigenvalue, "pinv_on_support input is not positive semi-definite");
  if (lmax == 0.0) return CMatrix::Zero(m.rows(), m.cols());
  RVector inv = RVector::Zero(eig.eigenvalues.size());
  for (Index i = 0; i < inv.size(); ++i)
    if (eig.eigenvalues(i) > cutoff * lmax) inv(i) = 1.0 / eig.eigenvalues(i);
  return eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.adjoint();
}

/// Projector onto the orthogonal complement of the support of a PSD matrix.
inline CMatrix null_space_projector(const CMatrix& m, double cutoff = tol::support_cut) {
  auto eig = herm_eig(m);
  const double lmax = eig.eigenvalues.size() ? std::max(0.0, eig.eigenvalues.maxCoeff()) : 0.0;
  CMatrix p = CMatrix::Zero(m.rows(), m.cols());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (lmax == 0.0 || eig.eigenvalues(i) <= cutoff * lmax)
      p += eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
  return p;
}

enum class Keep { A, B };

/// Trace over one factor of a bipartite operator on A (x) B, composite index a*dB + b.
inline CMatrix partial_trace(const CMatrix& m, Index dA, Index dB, Keep keep) {
  if (dA <= 0 || dB <= 0 || m.rows() != m.cols() || m.rows() != dA * dB)
    fail(errc::dimension_mismatch, "partial_trace dimensions do not match the operator");
  if (keep == Keep::A) {
    CMatrix out = CMatrix::Zero(dA, dA);
    for (Index a = 0; a < dA; ++a)
      for (Index a2 = 0; a2 < dA; ++a2)
        for (Index b = 0; b < dB; ++b) out(a, a2) += m(a * dB + b, a2 * dB + b);
    return out;
  }
  CMatrix out = CMatrix::Zero(dB, dB);
  for (Index b = 0; b < dB; ++b)
    for (Index b2 = 0; b2 < dB; ++b2)
      for (Index a = 0; a < dA; ++a) out(b, b2) += m(a * dB + b, a * dB + b2);
  return out;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector vec(const CMatrix& k) {
  CVector v(k.rows() * k.cols());
  for (Index i = 0; i < k.rows(); ++i)
    for (Index j = 0; j < k.cols(); ++j) v(i * k.cols() + j) = k(i, j);
  return v;
}

inline CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) fail(errc::dimension_mismatch, "unvec size mismatch");
  CMatrix k(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) k(i, j) = v(i * cols + j);
  return k;
}

}  // namespace qmetro
