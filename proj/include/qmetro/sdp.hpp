// SPDX-License-Identifier: Apache-2.0
//
// Small dense semidefinite programs:
//
//   minimize    c^T x
//   subject to  F_k(x) = F_{k,0} + sum_i x_i F_{k,i}  >= 0   (Hermitian blocks)
//               E x = d
//
// solved by a log-barrier interior-point method with exact Newton steps.
// Problems in this library are tiny (tens of real variables, blocks below
// ~50x50 after realification), so robustness and determinism matter more
// than asymptotic speed.
//
// build_ce_sdp assembles the channel-extension program: for a channel with
// Kraus stack K and derivative stack Kdot, minimize
//   4 ( lambda_a + (N-1) lambda_b )
// over Hermitian r x r rotation generators h, subject to Schur-form blocks
//   [[lambda_a I, D(h)^dag], [D(h), I]] >= 0,   D(h) = Kdot - i (h (x) I) K
//   [[lambda_b I, beta(h)^dag], [beta(h), I]] >= 0,  beta(h) = i D(h)^dag K
// which pin lambda_a >= ||alpha||, lambda_b >= ||beta||^2. The beta block is
// replaced by the linear equalities beta(h) = 0 when requested, and by
// nothing at N = 1 where its objective weight vanishes. A rank-one weight
// vector psi shrinks the lambda_a block to the span of psi, which turns the
// program into min 4 <psi| alpha(h) |psi>.
#pragma once

#include <algorithm>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmetro/channel.hpp"

namespace qmetro {

struct SdpBlock {
  CMatrix constant;
  std::vector<CMatrix> coeff;  // one Hermitian matrix per decision variable
  Index dim() const { return constant.rows(); }
};

struct SdpProblem {
  Index num_vars = 0;
  RVector objective;
  double objective_offset = 0.0;
  std::vector<SdpBlock> blocks;
  RMatrix eq_lhs;  // zero rows when no equality constraints
  RVector eq_rhs;
  RVector initial_guess;  // size 0 or num_vars
  std::vector<std::string> var_names;

  /// Hermitian-affine verification of every block.
  std::vector<std::string> check() const {
    std::vector<std::string> bad;
    if (objective.size() != num_vars) bad.push_back("objective size mismatch");
    for (const auto& b : blocks) {
      if (b.constant.rows() != b.constant.cols()) bad.push_back("non-square block");
      if (static_cast<Index>(b.coeff.size()) != num_vars) bad.push_back("block coefficient count mismatch");
      if (!is_hermitian(b.constant, 1e-10)) bad.push_back("non-Hermitian block constant");
      for (const auto& f : b.coeff) {
        if (f.rows() != b.constant.rows() || f.cols() != b.constant.cols())
          bad.push_back("block coefficient shape mismatch");
        else if (!is_hermitian(f, 1e-10))
          bad.push_back("non-Hermitian block coefficient");
      }
    }
    if (eq_lhs.rows() != eq_rhs.size() || (eq_lhs.rows() > 0 && eq_lhs.cols() != num_vars))
      bad.push_back("equality constraint shape mismatch");
    return bad;
  }
};

enum class SdpStatus { optimal, infeasible, max_iter };

struct SdpSolution {
  RVector x;
  double objective = 0.0;
  SdpStatus status = SdpStatus::max_iter;
  double gap = std::numeric_limits<double>::infinity();  // relative duality-gap bound
  double min_block_eig = 0.0;
  int newton_steps = 0;
  std::string note;
};

/// Replace every complex Hermitian block X by the real symmetric doubling
/// [[Re X, -Im X], [Im X, Re X]]; PSD-equivalence is preserved.
inline SdpProblem embed_real(const SdpProblem& p) {
  auto dbl = [](const CMatrix& x) {
    const Index n = x.rows();
    RMatrix re = x.real(), im = x.imag();
    RMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = re;
    out.topRightCorner(n, n) = -im;
    out.bottomLeftCorner(n, n) = im;
    out.bottomRightCorner(n, n) = re;
    return CMatrix(out.cast<Complex>());
  };
  SdpProblem q = p;
  for (auto& b : q.blocks) {
    SdpBlock nb;
    nb.constant = dbl(b.constant);
    for (const auto& f : b.coeff) nb.coeff.push_back(dbl(f));
    b = std::move(nb);
  }
  return q;
}

namespace detail {

struct RealBlock {
  RMatrix constant;
  std::vector<RMatrix> coeff;
  Index dim() const { return constant.rows(); }
};

inline RMatrix real_block_at(const RealBlock& b, const RVector& z) {
  RMatrix m = b.constant;
  for (Index i = 0; i < z.size(); ++i)
    if (z(i) != 0.0) m += z(i) * b.coeff[i];
  return m;
}

inline double min_eig(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// negative log-det barrier; +inf outside the cone
inline double barrier_value(const std::vector<RealBlock>& blocks, const RVector& z) {
  double v = 0.0;
  for (const auto& b : blocks) {
    RMatrix m = real_block_at(b, z);
    Eigen::LLT<RMatrix> llt(m);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    double ld = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double dii = llt.matrixLLT()(i, i);
      if (!(dii > 0.0)) return std::numeric_limits<double>::infinity();
      ld += std::log(dii);
    }
    v -= 2.0 * ld;
  }
  return v;
}

struct CenterControl {
  double t = 1.0;
  int max_newton = 100;
  double decrement_tol = 1e-10;
  // early-exit predicate on the current iterate (used by phase I)
  std::function<bool(const RVector&)> stop;
};

struct CenterOutcome {
  bool cone_ok = true;      // iterates stayed strictly inside the cone
  bool reached_tol = true;  // Newton decrement fell below its target
};

// Damped Newton centering of t*c^T z + barrier(z); z must start strictly
// feasible and stays so.
inline CenterOutcome center(const std::vector<RealBlock>& blocks, const RVector& c, RVector& z,
                            const CenterControl& ctl, int& newton_budget) {
  const Index n = z.size();
  if (n == 0) return {};
  for (int it = 0; it < ctl.max_newton && newton_budget > 0; ++it, --newton_budget) {
    // per-block whitened coefficient matrices
    RVector grad = ctl.t * c;
    RMatrix hess = RMatrix::Zero(n, n);
    std::vector<std::vector<RMatrix>> whitened(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      RMatrix m = real_block_at(blocks[k], z);
      Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
      if (es.info() != Eigen::Success) return {false, false};
      const RVector& w = es.eigenvalues();
      if (w.minCoeff() <= 0.0) return {false, false};
      RVector winv_sqrt = w.cwiseSqrt().cwiseInverse();
      RMatrix basis = es.eigenvectors() * winv_sqrt.asDiagonal();
      whitened[k].resize(n);
      for (Index i = 0; i < n; ++i) {
        whitened[k][i] = basis.transpose() * blocks[k].coeff[i] * basis;
        grad(i) -= whitened[k][i].trace();
      }
      for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) {
          const double hij = (whitened[k][i].array() * whitened[k][j].array()).sum();
          hess(i, j) += hij;
          if (j != i) hess(j, i) += hij;
        }
    }
    // Jacobi-scaled Newton solve; the barrier Hessian mixes curvatures of
    // hugely different magnitude near small-eigenvalue blocks
    RVector scale_d(n);
    for (Index i = 0; i < n; ++i) scale_d(i) = 1.0 / std::sqrt(std::max(hess(i, i), 1e-300));
    RVector step;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      RMatrix h = scale_d.asDiagonal() * hess * scale_d.asDiagonal();
      if (ridge > 0.0) h += ridge * RMatrix::Identity(n, n);
      Eigen::LDLT<RMatrix> ldlt(h);
      step = scale_d.asDiagonal() * ldlt.solve(RVector(-(scale_d.asDiagonal() * grad)));
      if (ldlt.info() == Eigen::Success && step.allFinite()) break;
      ridge = (ridge == 0.0) ? 1e-14 : ridge * 100.0;
    }
    if (!step.allFinite()) return {true, false};
    const double decrement2 = -grad.dot(step);
#ifdef QMETRO_SDP_TRACE
    std::fprintf(stderr, "  it=%d t=%.3e dec2=%.3e gnorm=%.3e\n", it, ctl.t, decrement2,
                 grad.norm());
#endif
    // stop at the Newton decrement target, or at the floating-point noise
    // floor of the objective at this barrier weight
    const double noise_floor = 1e-13 * (1.0 + std::abs(ctl.t * c.dot(z)));
    if (!(decrement2 > std::max(ctl.decrement_tol, noise_floor))) return {};

    // largest cone-preserving step
    double alpha_max = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      RMatrix dm = RMatrix::Zero(blocks[k].dim(), blocks[k].dim());
      for (Index i = 0; i < n; ++i)
        if (step(i) != 0.0) dm += step(i) * whitened[k][i];
      const double lmin = min_eig(dm);
      if (lmin < 0.0) alpha_max = std::min(alpha_max, -1.0 / lmin);
    }
    double alpha = std::min(1.0, 0.98 * alpha_max);
    const double f0 = ctl.t * c.dot(z) + barrier_value(blocks, z);
    const double slope = grad.dot(step);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      RVector zc = z + alpha * step;
      const double fc = ctl.t * c.dot(zc) + barrier_value(blocks, zc);
      if (fc <= f0 + 0.25 * alpha * slope) {
        // accept only iterates the eigenvalue check agrees are interior
        bool interior = true;
        for (const auto& b : blocks)
          if (min_eig(real_block_at(b, zc)) <= 0.0) {
            interior = false;
            break;
          }
        if (interior) {
          z = zc;
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) return {true, decrement2 <= 1e-2};  // stalled at numerical precision
    if (ctl.stop && ctl.stop(z)) return {};
  }
  return {true, false};  // iteration cap
}

}  // namespace detail

/// Deterministic interior-point solve. The reported gap is the relative
/// duality-gap bound m / (t * (1 + |objective|)) at termination; status
/// optimal requires it to be at most 1e-8.
inline SdpSolution solve(const SdpProblem& prob) {
  SdpSolution sol;
  {
    auto bad = prob.check();
    if (!bad.empty()) fail(errc::bad_parameter, "solve: malformed problem: " + bad.front());
  }
  const SdpProblem realp = embed_real(prob);
  const Index n = realp.num_vars;

  // ---- equality elimination: x = x0 + Z y
  RVector x0 = RVector::Zero(n);
  RMatrix z_basis = RMatrix::Identity(n, n);
  if (realp.eq_lhs.rows() > 0) {
    Eigen::JacobiSVD<RMatrix> svd(realp.eq_lhs, Eigen::ComputeFullU | Eigen::ComputeFullV);
    x0 = svd.solve(realp.eq_rhs);
    const double resid = (realp.eq_lhs * x0 - realp.eq_rhs).norm();
    if (resid > 1e-8 * (1.0 + realp.eq_rhs.norm())) {
      sol.status = SdpStatus::infeasible;
      sol.note = "inconsistent equality constraints, residual " + std::to_string(resid);
      return sol;
    }
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-12 * std::max(1.0, smax)) ++rank;
    z_basis = svd.matrixV().rightCols(n - rank);
  }
  const Index nf = z_basis.cols();

  std::vector<detail::RealBlock> blocks;
  for (const auto& b : realp.blocks) {
    detail::RealBlock rb;
    rb.constant = b.constant.real();
    for (Index i = 0; i < n; ++i)
      if (x0(i) != 0.0) rb.constant += x0(i) * b.coeff[i].real();
    rb.coeff.resize(nf);
    for (Index j = 0; j < nf; ++j) {
      RMatrix m = RMatrix::Zero(b.dim(), b.dim());
      for (Index i = 0; i < n; ++i)
        if (z_basis(i, j) != 0.0) m += z_basis(i, j) * b.coeff[i].real();
      rb.coeff[j] = m;
    }
    blocks.push_back(std::move(rb));
  }
  RVector c_red = z_basis.transpose() * realp.objective;

  // ---- presolve: directions that move no block are either irrelevant or
  // make the objective unbounded
  RMatrix reduce = RMatrix::Identity(nf, nf);
  if (nf > 0) {
    Index total = 0;
    for (const auto& b : blocks) total += b.dim() * b.dim();
    RMatrix map(total, nf);
    for (Index j = 0; j < nf; ++j) {
      Index at = 0;
      for (const auto& b : blocks) {
        map.block(at, j, b.dim() * b.dim(), 1) =
            Eigen::Map<const RVector>(b.coeff[j].data(), b.dim() * b.dim());
        at += b.dim() * b.dim();
      }
    }
    Eigen::JacobiSVD<RMatrix> svd(map, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-12 * std::max(1.0, smax)) ++rank;
    if (rank < nf) {
      RMatrix null_dirs = svd.matrixV().rightCols(nf - rank);
      if ((null_dirs.transpose() * c_red).cwiseAbs().maxCoeff() >
          1e-10 * (1.0 + c_red.norm())) {
        sol.status = SdpStatus::max_iter;
        sol.note = "objective unbounded along a constraint-null direction";
        return sol;
      }
      reduce = svd.matrixV().leftCols(rank);
    }
  }
  const Index nz = reduce.cols();
  std::vector<detail::RealBlock> rblocks;
  for (const auto& b : blocks) {
    detail::RealBlock rb;
    rb.constant = b.constant;
    rb.coeff.resize(nz);
    for (Index m = 0; m < nz; ++m) {
      RMatrix mm = RMatrix::Zero(b.dim(), b.dim());
      for (Index j = 0; j < nf; ++j)
        if (reduce(j, m) != 0.0) mm += reduce(j, m) * b.coeff[j];
      rb.coeff[m] = mm;
    }
    rblocks.push_back(std::move(rb));
  }
  RVector c_z = reduce.transpose() * c_red;

  double scale = 1.0;
  for (const auto& b : rblocks) scale = std::max(scale, b.constant.cwiseAbs().maxCoeff());
  const double strict_margin = 1e-9 * scale;

  auto finish = [&](const RVector& z, double t_final, int newton) {
    RVector y = reduce * z;
    sol.x = x0 + z_basis * y;
    sol.objective = prob.objective.dot(sol.x) + prob.objective_offset;
    sol.newton_steps = newton;
    double me = std::numeric_limits<double>::infinity();
    for (const auto& b : rblocks) me = std::min(me, detail::min_eig(detail::real_block_at(b, z)));
    sol.min_block_eig = me;
    Index m_total = 0;
    for (const auto& b : rblocks) m_total += b.dim();
    sol.gap = m_total / (t_final * (1.0 + std::abs(sol.objective)));
    sol.status = SdpStatus::optimal;
  };

  // ---- initial strictly feasible point
  RVector z = RVector::Zero(nz);
  if (realp.initial_guess.size() == n)
    z = reduce.transpose() * (z_basis.transpose() * (realp.initial_guess - x0));
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& b : rblocks) worst = std::min(worst, detail::min_eig(detail::real_block_at(b, z)));

  int newton_budget = 500;
  if (!(worst > strict_margin)) {
    // phase I: minimize s subject to F_k(z) + s I >= 0, inside a large trust
    // ball that keeps every centering subproblem bounded
    std::vector<detail::RealBlock> aug = rblocks;
    for (auto& b : aug) b.coeff.push_back(RMatrix::Identity(b.dim(), b.dim()));
    RVector zs(nz + 1);
    zs.head(nz) = z;
    zs(nz) = -worst * 1.2 + 0.1 * scale + 1.0;
    const double radius = 1e6 * (1.0 + zs.norm());
    {
      detail::RealBlock ball;
      ball.constant = radius * RMatrix::Identity(nz + 2, nz + 2);
      ball.coeff.resize(nz + 1);
      for (Index j = 0; j < nz + 1; ++j) {
        RMatrix f = RMatrix::Zero(nz + 2, nz + 2);
        f(j, nz + 1) = f(nz + 1, j) = 1.0;
        ball.coeff[j] = f;
      }
      aug.push_back(std::move(ball));
    }
    RVector cs = RVector::Zero(nz + 1);
    cs(nz) = 1.0;
    const double stop_at = -4.0 * strict_margin - 1e-12;
    bool found = false;
    double t = 1.0 / std::max(1.0, std::abs(zs(nz)));
    for (int round = 0; round < 40 && newton_budget > 0; ++round) {
      detail::CenterControl ctl;
      ctl.t = t;
      ctl.stop = [&](const RVector& cur) { return cur(nz) < stop_at; };
      if (!detail::center(aug, cs, zs, ctl, newton_budget).cone_ok) break;
      if (zs(nz) < stop_at) {
        found = true;
        break;
      }
      Index m_total = 0;
      for (const auto& b : aug) m_total += b.dim();
      if (m_total / t < 0.5 * strict_margin) break;  // converged without finding interior
      t *= 10.0;
    }
    if (!found) {
      sol.status = SdpStatus::infeasible;
      sol.note = "no strictly feasible point within the search radius, phase-I residual " +
                 std::to_string(zs(nz));
      sol.newton_steps = 500 - newton_budget;
      return sol;
    }
    z = zs.head(nz);
  }

  // ---- main barrier path
  Index m_total = 0;
  for (const auto& b : rblocks) m_total += b.dim();
  if (nz == 0) {
    finish(z, 1e18, 0);
    return sol;
  }
  double obj_now = prob.objective.dot(x0 + z_basis * (reduce * z)) + prob.objective_offset;
  double t = std::max(1.0, m_total / (1.0 + std::abs(obj_now)));
  double t_done = 0.0;
  for (int round = 0; round < 40 && newton_budget > 0; ++round) {
    detail::CenterControl ctl;
    ctl.t = t;
    auto oc = detail::center(rblocks, c_z, z, ctl, newton_budget);
    if (oc.cone_ok && !oc.reached_tol && newton_budget > 0)
      oc = detail::center(rblocks, c_z, z, ctl, newton_budget);
    if (!oc.cone_ok) {
      sol.status = SdpStatus::max_iter;
      sol.note = "interior-point iteration left the cone";
      sol.newton_steps = 500 - newton_budget;
      return sol;
    }
    if (!oc.reached_tol) break;  // stalled; report the last centered weight
    t_done = t;
    obj_now = prob.objective.dot(x0 + z_basis * (reduce * z)) + prob.objective_offset;
    if (m_total / (t * (1.0 + std::abs(obj_now))) <= 1e-9) break;
    t *= 10.0;
  }
  if (t_done == 0.0) {
    sol.status = SdpStatus::max_iter;
    sol.note = "centering stalled before the first barrier stage completed";
    sol.newton_steps = 500 - newton_budget;
    return sol;
  }
  finish(z, t_done, 500 - newton_budget);
  if (sol.gap > 1e-8) {
    sol.status = SdpStatus::max_iter;
    sol.note = "iteration budget exhausted before reaching the gap target";
  }
  return sol;
}

// ---------------------------------------------------------------------------
// channel-extension program
// ---------------------------------------------------------------------------

/// Real basis of Hermitian r x r matrices: r diagonal units, then for each
/// i < j the symmetric and antisymmetric-imaginary pair.
inline std::vector<CMatrix> hermitian_basis(Index r) {
  std::vector<CMatrix> basis;
  for (Index i = 0; i < r; ++i) {
    CMatrix m = CMatrix::Zero(r, r);
    m(i, i) = 1.0;
    basis.push_back(m);
  }
  for (Index i = 0; i < r; ++i)
    for (Index j = i + 1; j < r; ++j) {
      CMatrix m = CMatrix::Zero(r, r);
      m(i, j) = m(j, i) = 1.0;
      basis.push_back(m);
      CMatrix a = CMatrix::Zero(r, r);
      a(i, j) = IM;
      a(j, i) = -IM;
      basis.push_back(a);
    }
  return basis;
}

inline CMatrix h_from_coords(const RVector& coords, Index r) {
  auto basis = hermitian_basis(r);
  CMatrix h = CMatrix::Zero(r, r);
  for (std::size_t m = 0; m < basis.size(); ++m) h += coords(static_cast<Index>(m)) * basis[m];
  return h;
}

inline RVector h_to_coords(const CMatrix& h) {
  const Index r = h.rows();
  RVector theta(r * r);
  Index m = 0;
  for (Index i = 0; i < r; ++i) theta(m++) = h(i, i).real();
  for (Index i = 0; i < r; ++i)
    for (Index j = i + 1; j < r; ++j) {
      theta(m++) = h(i, j).real();
      theta(m++) = h(i, j).imag();
    }
  return theta;
}

/// Least-squares solve of sum_ij h_ij K_i^dag K_j = i sum_i dK_i^dag K_i for
/// a Hermitian h; solvability of this linear system decides whether a Kraus
/// representation with beta = 0 exists.
struct BetaZeroProbe {
  bool feasible = false;
  double residual = 0.0;
  CMatrix h;
};

inline BetaZeroProbe probe_beta_zero(const ParamChannel& ch) {
  const Index r = ch.rank(), d = ch.d_in;
  const auto basis = hermitian_basis(r);
  CMatrix target = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < ch.kraus.size(); ++i)
    target += IM * ch.dkraus[i].adjoint() * ch.kraus[i];
  const Index nm = static_cast<Index>(basis.size());
  RMatrix a(2 * d * d, nm);
  RVector b(2 * d * d);
  for (Index m = 0; m < nm; ++m) {
    CMatrix gm = CMatrix::Zero(d, d);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        if (basis[m](i, j) != Complex(0, 0))
          gm += basis[m](i, j) * ch.kraus[i].adjoint() * ch.kraus[j];
    Index row = 0;
    for (Index p = 0; p < d; ++p)
      for (Index q = 0; q < d; ++q) {
        a(row, m) = gm(p, q).real();
        a(row + 1, m) = gm(p, q).imag();
        row += 2;
      }
  }
  {
    Index row = 0;
    for (Index p = 0; p < d; ++p)
      for (Index q = 0; q < d; ++q) {
        b(row) = target(p, q).real();
        b(row + 1) = target(p, q).imag();
        row += 2;
      }
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  RVector theta = svd.solve(b);
  BetaZeroProbe out;
  out.residual = (a * theta - b).norm();
  out.feasible = out.residual <= 1e-8 * std::max(1.0, b.norm());
  out.h = h_from_coords(theta, r);
  return out;
}

/// alpha(h) = sum_i dK~_i^dag dK~_i for the rotated representation.
inline CMatrix ce_alpha(const ParamChannel& ch, const CMatrix& h) {
  ParamChannel rot = rotate_local(ch, h);
  CMatrix a = CMatrix::Zero(ch.d_in, ch.d_in);
  for (const auto& dk : rot.dkraus) a += dk.adjoint() * dk;
  return a;
}

/// beta(h) = i sum_i dK~_i^dag K_i.
inline CMatrix ce_beta(const ParamChannel& ch, const CMatrix& h) {
  ParamChannel rot = rotate_local(ch, h);
  CMatrix b = CMatrix::Zero(ch.d_in, ch.d_in);
  for (std::size_t i = 0; i < rot.kraus.size(); ++i) b += rot.dkraus[i].adjoint() * rot.kraus[i];
  return CMatrix(IM * b);
}

/// Direct evaluation 4(||alpha(h)|| + (N-1)||beta(h)||^2); an upper bound on
/// the program optimum for every Hermitian h.
inline double ce_objective(const ParamChannel& ch, const CMatrix& h, long n_probes) {
  const double a = op_norm(ce_alpha(ch, h));
  if (n_probes <= 1) return 4.0 * a;
  const double b = op_norm(ce_beta(ch, h));
  return 4.0 * (a + (n_probes - 1) * b * b);
}

struct CeSdp {
  SdpProblem problem;
  Index rank = 0;
  Index lambda_a_index = 0;
  Index lambda_b_index = -1;  // absent when negative
  CMatrix witness_h(const SdpSolution& s) const {
    return h_from_coords(s.x.head(rank * rank), rank);
  }
};

inline CeSdp build_ce_sdp(const ParamChannel& ch, long n_probes, bool enforce_beta_zero,
                          std::optional<CVector> weight = std::nullopt) {
  require_valid(ch, "build_ce_sdp");
  if (n_probes < 1) fail(errc::bad_parameter, "build_ce_sdp: N must be at least 1");
  if (weight) {
    if (n_probes != 1 || enforce_beta_zero)
      fail(errc::bad_parameter, "build_ce_sdp: a weight vector requires N = 1 and no beta constraint");
    if (weight->size() != ch.d_in)
      fail(errc::dimension_mismatch, "build_ce_sdp: weight vector dimension mismatch");
  }
  const Index r = ch.rank(), din = ch.d_in, dout = ch.d_out;
  const auto basis = hermitian_basis(r);
  const Index nh = static_cast<Index>(basis.size());
  const bool with_beta_block = !enforce_beta_zero && n_probes >= 2;
  const Index nvars = nh + 1 + (with_beta_block ? 1 : 0);

  CeSdp out;
  out.rank = r;
  out.lambda_a_index = nh;
  out.lambda_b_index = with_beta_block ? nh + 1 : -1;
  SdpProblem& p = out.problem;
  p.num_vars = nvars;
  p.objective = RVector::Zero(nvars);
  p.objective(nh) = 4.0;
  if (with_beta_block) p.objective(nh + 1) = 4.0;  // variable is (N-1) lambda_b
  p.var_names.resize(nvars, "h");
  p.var_names[nh] = "lambda_a";
  if (with_beta_block) p.var_names[nh + 1] = "lambda_b";

  const CMatrix kstack = detail::kraus_stack(ch.kraus);
  const CMatrix dstack = detail::kraus_stack(ch.dkraus);
  // D coefficient per h-basis element: -i (H (x) I) K, realized block-wise
  auto mix = [&](const CMatrix& hm) {
    CMatrix m = CMatrix::Zero(r * dout, din);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        if (hm(i, j) != Complex(0, 0))
          m.block(i * dout, 0, dout, din) -= IM * hm(i, j) * ch.kraus[j];
    return m;
  };

  // block A
  {
    SdpBlock a;
    if (weight) {
      const Index dim = 1 + r * dout;
      a.constant = CMatrix::Zero(dim, dim);
      CVector dpsi = dstack * (*weight);
      a.constant.block(1, 0, r * dout, 1) = dpsi;
      a.constant.block(0, 1, 1, r * dout) = dpsi.adjoint();
      a.constant.block(1, 1, r * dout, r * dout) = cidentity(r * dout);
      for (Index m = 0; m < nh; ++m) {
        CMatrix f = CMatrix::Zero(dim, dim);
        CVector dmpsi = mix(basis[m]) * (*weight);
        f.block(1, 0, r * dout, 1) = dmpsi;
        f.block(0, 1, 1, r * dout) = dmpsi.adjoint();
        a.coeff.push_back(f);
      }
      CMatrix fl = CMatrix::Zero(dim, dim);
      fl(0, 0) = 1.0;
      a.coeff.push_back(fl);
    } else {
      const Index dim = din + r * dout;
      a.constant = CMatrix::Zero(dim, dim);
      a.constant.block(din, 0, r * dout, din) = dstack;
      a.constant.block(0, din, din, r * dout) = dstack.adjoint();
      a.constant.block(din, din, r * dout, r * dout) = cidentity(r * dout);
      for (Index m = 0; m < nh; ++m) {
        CMatrix f = CMatrix::Zero(dim, dim);
        CMatrix dm = mix(basis[m]);
        f.block(din, 0, r * dout, din) = dm;
        f.block(0, din, din, r * dout) = dm.adjoint();
        a.coeff.push_back(f);
      }
      CMatrix fl = CMatrix::Zero(dim, dim);
      fl.topLeftCorner(din, din) = cidentity(din);
      a.coeff.push_back(fl);
    }
    if (with_beta_block) a.coeff.push_back(CMatrix::Zero(a.dim(), a.dim()));
    p.blocks.push_back(std::move(a));
  }

  const CMatrix beta0 = IM * dstack.adjoint() * kstack;
  std::vector<CMatrix> beta_coeff;  // per h-basis element
  for (Index m = 0; m < nh; ++m) beta_coeff.push_back(CMatrix(IM * mix(basis[m]).adjoint() * kstack));

  if (enforce_beta_zero) {
    // beta(h) = 0 as d_in^2 real equations
    const Index rows = din * din;
    p.eq_lhs = RMatrix::Zero(rows, nvars);
    p.eq_rhs = RVector::Zero(rows);
    Index row = 0;
    for (Index a = 0; a < din; ++a)
      for (Index b = a; b < din; ++b) {
        for (Index m = 0; m < nh; ++m) p.eq_lhs(row, m) = beta_coeff[m](a, b).real();
        p.eq_rhs(row) = -beta0(a, b).real();
        ++row;
        if (b > a) {
          for (Index m = 0; m < nh; ++m) p.eq_lhs(row, m) = beta_coeff[m](a, b).imag();
          p.eq_rhs(row) = -beta0(a, b).imag();
          ++row;
        }
      }
  } else if (with_beta_block) {
    // the beta block is stated for the rescaled variable (N-1) lambda_b and
    // carries sqrt(N-1) beta, which keeps the block entries of one magnitude
    // even for very large N; the objective value 4(lambda_a + (N-1)lambda_b)
    // is unchanged
    const double w = std::sqrt(static_cast<double>(n_probes - 1));
    SdpBlock bb;
    const Index dim = 2 * din;
    bb.constant = CMatrix::Zero(dim, dim);
    bb.constant.block(din, 0, din, din) = w * beta0;
    bb.constant.block(0, din, din, din) = w * beta0.adjoint();
    bb.constant.block(din, din, din, din) = cidentity(din);
    for (Index m = 0; m < nh; ++m) {
      CMatrix f = CMatrix::Zero(dim, dim);
      f.block(din, 0, din, din) = w * beta_coeff[m];
      f.block(0, din, din, din) = w * beta_coeff[m].adjoint();
      bb.coeff.push_back(f);
    }
    bb.coeff.push_back(CMatrix::Zero(dim, dim));  // lambda_a does not enter
    CMatrix fl = CMatrix::Zero(dim, dim);
    fl.topLeftCorner(din, din) = cidentity(din);
    bb.coeff.push_back(fl);
    p.blocks.push_back(std::move(bb));
  }

  p.initial_guess = RVector::Zero(nvars);
  if (enforce_beta_zero) {
    // start on the constraint manifold so the interior is reachable by
    // raising lambda_a alone
    auto probe = probe_beta_zero(ch);
    p.initial_guess.head(nh) = h_to_coords(probe.h);
    p.initial_guess(nh) = 2.0 * op_norm(ce_alpha(ch, probe.h)) + 1.0;
  } else {
    // warm start: the unrotated representation, or a representation with
    // vanishing beta when that lowers the N-weighted objective (it usually
    // does once N exceeds the asymptotic bound)
    CMatrix h0 = CMatrix::Zero(r, r);
    if (with_beta_block) {
      auto probe = probe_beta_zero(ch);
      if (probe.feasible &&
          ce_objective(ch, probe.h, n_probes) < ce_objective(ch, h0, n_probes))
        h0 = probe.h;
    }
    p.initial_guess.head(nh) = h_to_coords(h0);
    p.initial_guess(nh) = 2.0 * op_norm(ce_alpha(ch, h0)) + 1.0;
    if (with_beta_block)
      p.initial_guess(nh + 1) =
          2.0 * (n_probes - 1) * std::pow(op_norm(ce_beta(ch, h0)), 2) + 1.0;
  }
  return out;
}

/// Structured-text dump of a problem (variables, objective, dense block
/// coefficient arrays, equalities) for cross-checking against external
/// solvers. Numbers carry full binary64 precision.
inline std::string dump_problem(const SdpProblem& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto put_matrix = [&](const CMatrix& m) {
    os << "[";
    for (Index i = 0; i < m.rows(); ++i) {
      os << (i ? "," : "") << "[";
      for (Index j = 0; j < m.cols(); ++j)
        os << (j ? "," : "") << "[" << m(i, j).real() << "," << m(i, j).imag() << "]";
      os << "]";
    }
    os << "]";
  };
  os << "{\"num_vars\":" << p.num_vars << ",\"objective\":[";
  for (Index i = 0; i < p.num_vars; ++i) os << (i ? "," : "") << p.objective(i);
  os << "],\"objective_offset\":" << p.objective_offset << ",\"blocks\":[";
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    os << (k ? "," : "") << "{\"dim\":" << p.blocks[k].dim() << ",\"constant\":";
    put_matrix(p.blocks[k].constant);
    os << ",\"coeff\":[";
    for (std::size_t i = 0; i < p.blocks[k].coeff.size(); ++i) {
      if (i) os << ",";
      put_matrix(p.blocks[k].coeff[i]);
    }
    os << "]}";
  }
  os << "],\"equalities\":{\"lhs\":[";
  for (Index i = 0; i < p.eq_lhs.rows(); ++i) {
    os << (i ? "," : "") << "[";
    for (Index j = 0; j < p.eq_lhs.cols(); ++j) os << (j ? "," : "") << p.eq_lhs(i, j);
    os << "]";
  }
  os << "],\"rhs\":[";
  for (Index i = 0; i < p.eq_rhs.size(); ++i) os << (i ? "," : "") << p.eq_rhs(i);
  os << "]}}";
  return os.str();
}

}  // namespace qmetro
