// SPDX-License-Identifier: Apache-2.0
//
// State-level estimation quantities: classical Fisher information, symmetric
// logarithmic derivative and QFI, the pure-state shortcut, the RLD upper
// bound, and the channel-output QFI computed through a minimization over
// local Kraus rotations.
#pragma once

#include <cmath>

#include "qmetro/sdp.hpp"

namespace qmetro {

/// A parameterized state at a point: density matrix and its derivative.
struct StatePair {
  CMatrix rho;   // Hermitian PSD, unit trace
  CMatrix drho;  // Hermitian, traceless
};

inline StatePair make_state_pair(const CMatrix& rho, const CMatrix& drho) {
  if (rho.rows() != rho.cols() || drho.rows() != drho.cols() || rho.rows() != drho.rows())
    fail(errc::dimension_mismatch, "state pair matrices must be square and equally sized");
  if (!is_hermitian(rho) || std::abs(rho.trace().real() - 1.0) > 1e-10 ||
      std::abs(rho.trace().imag()) > 1e-10)
    fail(errc::bad_parameter, "rho must be Hermitian with unit trace");
  if (!is_hermitian(drho) || std::abs(drho.trace()) > 1e-10)
    fail(errc::bad_parameter, "drho must be Hermitian and traceless");
  return {rho, drho};
}

/// Classical Fisher information sum dp_i^2 / p_i over outcomes with
/// non-negligible probability. Derivative mass on a zero-probability outcome
/// is an error.
inline double classical_fi(const RVector& p, const RVector& dp) {
  if (p.size() != dp.size()) fail(errc::dimension_mismatch, "classical_fi size mismatch");
  if (p.size() == 0 || p.minCoeff() < -1e-12) fail(errc::bad_parameter, "probabilities must be non-negative");
  if (std::abs(p.sum() - 1.0) > 1e-10) fail(errc::bad_parameter, "probabilities must sum to one");
  if (std::abs(dp.sum()) > 1e-8) fail(errc::bad_parameter, "probability derivatives must sum to zero");
  double fi = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) > 1e-14)
      fi += dp(i) * dp(i) / p(i);
    else if (std::abs(dp(i)) > 1e-7)
      fail(errc::singular_distribution, "derivative mass on a zero-probability outcome");
  }
  return fi;
}

/// Symmetric logarithmic derivative L with drho = (rho L + L rho)/2,
/// constructed in the eigenbasis of rho; terms with vanishing denominator
/// are dropped.
inline CMatrix sld(const StatePair& s) {
  auto eig = herm_eig(s.rho);
  const CMatrix d = eig.eigenvectors.adjoint() * s.drho * eig.eigenvectors;
  CMatrix l = CMatrix::Zero(d.rows(), d.cols());
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j) {
      const double den = eig.eigenvalues(i) + eig.eigenvalues(j);
      if (den > 1e-12) l(i, j) = 2.0 * d(i, j) / den;
    }
  return eig.eigenvectors * l * eig.eigenvectors.adjoint();
}

/// Quantum Fisher information Tr(rho L^2), evaluated directly in the
/// eigenbasis as sum_ij 2 |drho_ij|^2 / (lambda_i + lambda_j).
inline double qfi(const StatePair& s) {
  auto eig = herm_eig(s.rho);
  const CMatrix d = eig.eigenvectors.adjoint() * s.drho * eig.eigenvectors;
  double f = 0.0;
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j) {
      const double den = eig.eigenvalues(i) + eig.eigenvalues(j);
      if (den > 1e-12) f += 2.0 * std::norm(d(i, j)) / den;
    }
  return f;
}

/// Pure-state QFI 4(<dpsi|dpsi> - |<dpsi|psi>|^2).
inline double qfi_pure(const CVector& psi, const CVector& dpsi) {
  if (psi.size() != dpsi.size()) fail(errc::dimension_mismatch, "qfi_pure size mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-8) fail(errc::bad_parameter, "psi must be normalized");
  const Complex overlap = psi.adjoint() * dpsi;
  if (std::abs(overlap.real()) > 1e-8)
    fail(errc::bad_parameter, "Re<dpsi|psi> must vanish for a normalized family");
  const double v = 4.0 * (dpsi.squaredNorm() - std::norm(overlap));
  return v > 0.0 ? v : 0.0;
}

/// RLD upper bound Tr(rho^{-1} drho^2) with the inverse restricted to the
/// support; requires drho to live inside the support of rho.
inline double rld_qfi(const StatePair& s) {
  const CMatrix perp = null_space_projector(s.rho);
  if (op_norm(CMatrix(perp * s.drho)) > 1e-8)
    fail(errc::support_violation, "drho is not supported inside the support of rho");
  const CMatrix inv = pinv_on_support(s.rho);
  return (inv * s.drho * s.drho).trace().real();
}

/// Output state of a channel on a pure input, with its parameter derivative.
inline StatePair channel_output(const ParamChannel& ch, const CVector& psi) {
  if (psi.size() != ch.d_in) fail(errc::dimension_mismatch, "input dimension mismatch");
  CMatrix rho = CMatrix::Zero(ch.d_out, ch.d_out);
  CMatrix drho = CMatrix::Zero(ch.d_out, ch.d_out);
  for (std::size_t i = 0; i < ch.kraus.size(); ++i) {
    const CVector v = ch.kraus[i] * psi;
    const CVector dv = ch.dkraus[i] * psi;
    rho += v * v.adjoint();
    drho += dv * v.adjoint() + v * dv.adjoint();
  }
  return {rho, drho};
}

/// Channel-output QFI computed as 4 min_h <psi| alpha(h) |psi> over local
/// Kraus-rotation generators h, via the rank-one weighted extension program.
/// Agrees with qfi(channel_output(ch, psi)).
inline double purification_qfi(const ParamChannel& ch, const CVector& psi) {
  require_valid(ch, "purification_qfi");
  if (psi.size() != ch.d_in) fail(errc::dimension_mismatch, "purification_qfi input dimension");
  if (std::abs(psi.norm() - 1.0) > 1e-8) fail(errc::bad_parameter, "input must be normalized");
  CeSdp prog = build_ce_sdp(ch, 1, false, psi);
  SdpSolution s = solve(prog.problem);
  const bool usable = s.status == SdpStatus::optimal ||
                      (s.status == SdpStatus::max_iter && s.x.size() > 0 && s.gap <= 1e-7);
  if (!usable)
    fail(errc::solver_failure, "purification_qfi: extension program did not converge: " + s.note);
  const CMatrix h = prog.witness_h(s);
  const CMatrix alpha = ce_alpha(ch, h);
  const double v = 4.0 * psi.dot(alpha * psi).real();
  return v > 0.0 ? v : 0.0;
}

}  // namespace qmetro
