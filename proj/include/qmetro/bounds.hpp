// SPDX-License-Identifier: Apache-2.0
//
// Channel-level precision quantities and the four asymptotic bound
// constructions, plus the finite-N channel-extension bound:
//
//   channel_qfi     max over pure inputs of the output-state QFI
//   extended_qfi    4 min_h ||alpha(h)||, the ancilla-assisted channel QFI
//   cs_bound        classical-simulation bound 1/(eps+ eps-) from the range
//                   of the Choi line Omega +/- eps dOmega inside the PSD cone
//   rld_bound       ||Tr_out{ dOmega Omega^-1 dOmega }||
//   ce_asymptotic   4 min_{h : beta(h)=0} ||alpha(h)||
//   qs_bound        min lambda with alpha = (lambda/4) I and beta = 0
//   ce_finite       4 min_h { ||alpha|| + (N-1) ||beta||^2 }
//
// The hierarchy ce <= qs <= rld <= cs holds wherever the bounds apply.
#pragma once

#include <map>
#include <optional>

#include "qmetro/detail/optim.hpp"
#include "qmetro/fisher.hpp"

namespace qmetro {

enum class BoundStatus { exact, upper_bound, infeasible, not_applicable };

inline const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::exact: return "exact";
    case BoundStatus::upper_bound: return "upper-bound";
    case BoundStatus::infeasible: return "infeasible";
    case BoundStatus::not_applicable: return "not-applicable";
  }
  return "?";
}

struct BoundResult {
  double value = 0.0;
  BoundStatus status = BoundStatus::upper_bound;
  std::optional<CMatrix> witness_h;
  std::optional<CVector> witness_input;
  std::optional<std::pair<double, double>> witness_eps;
  std::map<std::string, double> diagnostics;

  bool applicable() const {
    return status == BoundStatus::exact || status == BoundStatus::upper_bound;
  }
};

namespace detail {

/// True when the Choi derivative vanishes, i.e. the channel carries no local
/// information about the parameter (e.g. catalog channels at eta = 0).
inline bool locally_constant(const ParamChannel& ch) {
  ChoiPair cp = choi(ch);
  return op_norm(cp.domega) <= 1e-12 * std::max(1.0, op_norm(cp.omega));
}

inline BoundResult zero_information_result() {
  BoundResult r;
  r.value = 0.0;
  r.status = BoundStatus::exact;
  r.diagnostics["zero_information"] = 1.0;
  return r;
}

/// Weakly converged interior-point runs are still usable: the witness gives
/// a valid bound whose tightness is limited only by the achieved gap.
inline bool solution_usable(const SdpSolution& s) {
  return s.status == SdpStatus::optimal ||
         (s.status == SdpStatus::max_iter && s.x.size() > 0 && s.gap <= 1e-7);
}

inline CVector bloch_ket(double theta, double phi) {
  CVector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::exp(IM * phi) * std::sin(theta / 2.0);
  return v;
}

}  // namespace detail

/// Channel QFI: maximal output-state QFI over pure inputs. For qubit inputs
/// the global maximum is certified by a 64 x 64 Bloch-angle grid followed by
/// local refinement; larger input spaces use seeded multistart ascent.
inline BoundResult channel_qfi(const ParamChannel& ch) {
  require_valid(ch, "channel_qfi");
  if (detail::locally_constant(ch)) return detail::zero_information_result();
  BoundResult res;
  auto value_at = [&](const CVector& psi) { return qfi(channel_output(ch, psi)); };
  if (ch.d_in == 2) {
    constexpr int grid = 64;
    double best = -1.0, best_theta = 0.0, best_phi = 0.0;
    for (int it = 0; it < grid; ++it) {
      const double theta = M_PI * (it + 0.5) / grid;
      for (int ip = 0; ip < grid; ++ip) {
        const double phi = 2.0 * M_PI * ip / grid;
        const double v = value_at(detail::bloch_ket(theta, phi));
        if (v > best) {
          best = v;
          best_theta = theta;
          best_phi = phi;
        }
      }
    }
    RVector start(2);
    start << best_theta, best_phi;
    RVector opt = detail::nelder_mead(
        [&](const RVector& p) { return -value_at(detail::bloch_ket(p(0), p(1))); }, start,
        M_PI / grid, 1e-8);
    const CVector psi = detail::bloch_ket(opt(0), opt(1));
    const double refined = value_at(psi);
    res.value = std::max(refined, best);
    res.witness_input = refined >= best ? psi : detail::bloch_ket(best_theta, best_phi);
  } else {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    double best = -1.0;
    CVector best_psi;
    for (int rs = 0; rs < 16; ++rs) {
      CVector psi = detail::random_unit_vector(ch.d_in, rng);
      const double v = detail::compass_ascend_unit(value_at, psi);
      if (v > best) {
        best = v;
        best_psi = psi;
      }
    }
    res.value = best;
    res.witness_input = best_psi;
  }
  res.status = BoundStatus::exact;
  return res;
}

/// Extended channel QFI through the N = 1 extension program.
inline BoundResult extended_qfi(const ParamChannel& ch) {
  require_valid(ch, "extended_qfi");
  if (detail::locally_constant(ch)) return detail::zero_information_result();
  CeSdp prog = build_ce_sdp(ch, 1, false);
  SdpSolution s = solve(prog.problem);
  if (!detail::solution_usable(s)) fail(errc::solver_failure, "extended_qfi: " + s.note);
  BoundResult res;
  res.witness_h = prog.witness_h(s);
  res.value = ce_objective(ch, *res.witness_h, 1);
  res.status = BoundStatus::exact;
  res.diagnostics["sdp_gap"] = s.gap;
  res.diagnostics["sdp_objective"] = s.objective;
  return res;
}

/// Finite-N channel-extension bound 4 min_h { ||alpha|| + (N-1)||beta||^2 }.
/// At N = 1 this is the extended channel QFI.
inline BoundResult ce_finite(const ParamChannel& ch, long n_probes) {
  require_valid(ch, "ce_finite");
  if (n_probes < 1) fail(errc::bad_parameter, "ce_finite: N must be at least 1");
  if (detail::locally_constant(ch)) return detail::zero_information_result();
  // continuation over N: very large probe counts are solved through a ladder
  // of geometrically growing N, each warm-started at the previous witness
  std::vector<long> ladder;
  for (long nk = 256; nk < n_probes; nk *= 16) ladder.push_back(nk);
  ladder.push_back(n_probes);
  std::optional<CMatrix> warm;
  SdpSolution s;
  CeSdp prog;
  for (long nk : ladder) {
    prog = build_ce_sdp(ch, nk, false);
    if (warm) {
      const Index nh = prog.rank * prog.rank;
      prog.problem.initial_guess.head(nh) = h_to_coords(*warm);
      prog.problem.initial_guess(nh) = 2.0 * op_norm(ce_alpha(ch, *warm)) + 1.0;
      if (prog.lambda_b_index >= 0)
        prog.problem.initial_guess(prog.lambda_b_index) =
            2.0 * (nk - 1) * std::pow(op_norm(ce_beta(ch, *warm)), 2) + 1.0;
    }
    s = solve(prog.problem);
    if (!detail::solution_usable(s)) fail(errc::solver_failure, "ce_finite: " + s.note);
    warm = prog.witness_h(s);
  }
  BoundResult res;
  res.witness_h = *warm;
  res.value = ce_objective(ch, *res.witness_h, n_probes);
  res.status = n_probes == 1 ? BoundStatus::exact : BoundStatus::upper_bound;
  res.diagnostics["sdp_gap"] = s.gap;
  res.diagnostics["sdp_objective"] = s.objective;
  res.diagnostics["beta_norm"] = op_norm(ce_beta(ch, *res.witness_h));
  return res;
}

/// Asymptotic channel-extension bound 4 min_h ||alpha(h)|| under beta = 0.
/// Throws beta_zero_infeasible when no Kraus representation with vanishing
/// beta exists (such channels may beat the 1/sqrt(N) scaling; use ce_finite
/// with growing N instead).
inline BoundResult ce_asymptotic(const ParamChannel& ch) {
  require_valid(ch, "ce_asymptotic");
  if (detail::locally_constant(ch)) return detail::zero_information_result();
  auto probe = probe_beta_zero(ch);
  if (!probe.feasible)
    fail(errc::beta_zero_infeasible,
         "ce_asymptotic: no beta = 0 representation, residual " + std::to_string(probe.residual));
  CeSdp prog = build_ce_sdp(ch, 1, true);
  SdpSolution s = solve(prog.problem);
  if (!detail::solution_usable(s)) fail(errc::solver_failure, "ce_asymptotic: " + s.note);
  BoundResult res;
  res.witness_h = prog.witness_h(s);
  res.value = 4.0 * op_norm(ce_alpha(ch, *res.witness_h));
  res.status = BoundStatus::upper_bound;  // saturated asymptotically
  res.diagnostics["sdp_gap"] = s.gap;
  res.diagnostics["beta_residual"] = op_norm(ce_beta(ch, *res.witness_h));
  return res;
}

/// RLD-based bound on the extended channel QFI. Applicable iff the squared
/// Choi derivative is supported inside the Choi matrix support.
inline BoundResult rld_bound(const ParamChannel& ch) {
  require_valid(ch, "rld_bound");
  ChoiPair cp = choi(ch);
  const CMatrix perp = null_space_projector(cp.omega);
  const double dnorm = op_norm(cp.domega);
  const double off = op_norm(CMatrix(perp * cp.domega * cp.domega * perp));
  BoundResult res;
  if (off > 1e-8 * dnorm * dnorm) {
    res.status = BoundStatus::not_applicable;
    res.diagnostics["support_leak"] = off;
    return res;
  }
  const CMatrix inv = pinv_on_support(cp.omega);
  const CMatrix m = partial_trace(CMatrix(cp.domega * inv * cp.domega), ch.d_out, ch.d_in, Keep::B);
  res.value = op_norm(m);
  res.status = BoundStatus::upper_bound;
  return res;
}

/// Classical-simulation bound 1/(eps+ eps-) where eps+- are the largest
/// parameters keeping Omega +/- eps dOmega positive semi-definite. Channels
/// sitting on the boundary of the CPTP set along dOmega admit no such range.
inline BoundResult cs_bound(const ParamChannel& ch) {
  require_valid(ch, "cs_bound");
  if (detail::locally_constant(ch)) return detail::zero_information_result();
  ChoiPair cp = choi(ch);
  BoundResult res;
  {
    // boundary channels admit no mixing range at all; the finite-tolerance
    // cone test alone cannot see the second-order violation, so the support
    // condition decides up front
    const CMatrix perp = null_space_projector(cp.omega);
    const double dnorm = op_norm(cp.domega);
    const double leak = op_norm(CMatrix(perp * cp.domega * cp.domega * perp));
    if (leak > 1e-8 * dnorm * dnorm) {
      res.status = BoundStatus::not_applicable;
      res.diagnostics["support_leak"] = leak;
      return res;
    }
  }
  constexpr double bracket = 1e3;
  auto psd = [&](double eps, double sign) {
    const CMatrix m = cp.omega + sign * eps * cp.domega;
    auto eig = herm_eig(m);
    const double lmax = std::max(0.0, eig.eigenvalues.maxCoeff());
    return eig.eigenvalues.minCoeff() >= -tol::psd * lmax;
  };
  bool clamped = false;
  auto max_eps = [&](double sign) {
    double lo = 0.0, hi = 1.0;
    while (psd(hi, sign)) {
      lo = hi;
      hi *= 2.0;
      if (hi > bracket) {
        clamped = true;
        return bracket;
      }
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (psd(mid, sign) ? lo : hi) = mid;
    }
    return lo;
  };
  const double ep = max_eps(+1.0);
  const double em = max_eps(-1.0);
  if (ep < 1e-9 || em < 1e-9) {
    res.status = BoundStatus::not_applicable;
    res.witness_eps = {ep, em};
    return res;
  }
  if (clamped) res.diagnostics["bracket_clamped"] = 1.0;
  res.value = 1.0 / (ep * em);
  res.witness_eps = {ep, em};
  res.status = BoundStatus::upper_bound;
  return res;
}

namespace detail {

struct QsPenaltyWork {
  const ParamChannel* ch;
  CMatrix kstack, dstack;
  std::vector<CMatrix> gmats;  // dD/dtheta_m
  std::vector<CMatrix> bmats;  // dbeta/dtheta_m
  Index r, d, dout;

  explicit QsPenaltyWork(const ParamChannel& c) : ch(&c) {
    r = c.rank();
    d = c.d_in;
    dout = c.d_out;
    kstack = kraus_stack(c.kraus);
    dstack = kraus_stack(c.dkraus);
    for (const auto& hm : hermitian_basis(r)) {
      CMatrix g = CMatrix::Zero(r * dout, d);
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < r; ++j)
          if (hm(i, j) != Complex(0, 0)) g.block(i * dout, 0, dout, d) -= IM * hm(i, j) * c.kraus[j];
      gmats.push_back(g);
      bmats.push_back(CMatrix(IM * g.adjoint() * kstack));
    }
  }

  CMatrix dmat(const RVector& theta) const {
    CMatrix dm = dstack;
    for (std::size_t m = 0; m < gmats.size(); ++m) dm += theta(static_cast<Index>(m)) * gmats[m];
    return dm;
  }

  // objective (4/d) Tr alpha + mu (||beta||_F^2 + ||alpha - (Tr alpha/d) I||_F^2)
  double eval(const RVector& theta, double mu, RVector* grad) const {
    const CMatrix dm = dmat(theta);
    const CMatrix alpha = dm.adjoint() * dm;
    const CMatrix beta = IM * dm.adjoint() * kstack;
    const double tr_alpha = alpha.trace().real();
    const CMatrix rmat = alpha - (tr_alpha / d) * cidentity(d);
    const double f =
        (4.0 / d) * tr_alpha + mu * (beta.squaredNorm() + rmat.squaredNorm());
    if (grad) {
      grad->resize(static_cast<Index>(gmats.size()));
      for (std::size_t m = 0; m < gmats.size(); ++m) {
        const double d_tr = 2.0 * (gmats[m].adjoint() * dm).trace().real();
        const double d_beta = 2.0 * (bmats[m].adjoint() * beta).trace().real();
        const double d_r = 4.0 * (gmats[m].adjoint() * dm * rmat).trace().real();
        (*grad)(static_cast<Index>(m)) = (4.0 / d) * d_tr + mu * (d_beta + d_r);
      }
    }
    return f;
  }

  // combined feasibility residuals, scaled by the size of alpha
  std::pair<double, double> residuals(const RVector& theta) const {
    const CMatrix dm = dmat(theta);
    const CMatrix alpha = dm.adjoint() * dm;
    const CMatrix beta = IM * dm.adjoint() * kstack;
    const double scale = std::max(1.0, op_norm(alpha));
    const CMatrix rmat = alpha - (alpha.trace().real() / d) * cidentity(d);
    return {op_norm(beta) / scale, op_norm(rmat) / scale};
  }

  // Gauss-Newton polish of the feasibility system (beta = 0, alpha prop. I)
  void polish(RVector& theta) const {
    const Index nm = static_cast<Index>(gmats.size());
    const Index rows = 4 * d * d;
    for (int it = 0; it < 40; ++it) {
      const CMatrix dm = dmat(theta);
      const CMatrix alpha = dm.adjoint() * dm;
      const CMatrix beta = IM * dm.adjoint() * kstack;
      const double tr_alpha = alpha.trace().real();
      const CMatrix rmat = alpha - (tr_alpha / d) * cidentity(d);
      RVector c(rows);
      Index at = 0;
      auto put = [&](const CMatrix& m, RVector& dst, Index& pos) {
        for (Index p = 0; p < d; ++p)
          for (Index q = 0; q < d; ++q) {
            dst(pos++) = m(p, q).real();
            dst(pos++) = m(p, q).imag();
          }
      };
      put(rmat, c, at);
      put(beta, c, at);
      if (c.norm() < 1e-14) return;
      RMatrix jac(rows, nm);
      for (Index m = 0; m < nm; ++m) {
        const CMatrix d_alpha = gmats[m].adjoint() * dm + dm.adjoint() * gmats[m];
        const CMatrix d_r = d_alpha - (d_alpha.trace().real() / d) * cidentity(d);
        RVector col(rows);
        Index pos = 0;
        put(d_r, col, pos);
        put(bmats[m], col, pos);
        jac.col(m) = col;
      }
      Eigen::JacobiSVD<RMatrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-10);
      RVector step = svd.solve(-c);
      double alpha_ls = 1.0;
      const double c0 = c.norm();
      bool moved = false;
      for (int ls = 0; ls < 20; ++ls) {
        RVector cand = theta + alpha_ls * step;
        const CMatrix dmc = dmat(cand);
        const CMatrix ac = dmc.adjoint() * dmc;
        const CMatrix bc = IM * dmc.adjoint() * kstack;
        const CMatrix rc = ac - (ac.trace().real() / d) * cidentity(d);
        RVector cc(rows);
        Index pos = 0;
        put(rc, cc, pos);
        put(bc, cc, pos);
        if (cc.norm() < c0 * (1.0 - 1e-4 * alpha_ls)) {
          theta = cand;
          moved = true;
          break;
        }
        alpha_ls *= 0.5;
      }
      if (!moved) return;
    }
  }
};

}  // namespace detail

/// Quantum-simulation bound: the least lambda admitting a Kraus
/// representation with alpha = (lambda/4) I and beta = 0. Solved in stages:
/// (i) if the asymptotic extension witness already has alpha proportional to
/// identity the two bounds coincide exactly; (ii) otherwise a penalty
/// continuation over rotation generators is run from multiple restarts;
/// (iii) infeasible if beta = 0 cannot hold or the proportionality residual
/// cannot be driven below 1e-6.
inline BoundResult qs_bound(const ParamChannel& ch) {
  require_valid(ch, "qs_bound");
  if (detail::locally_constant(ch)) return detail::zero_information_result();
  BoundResult res;
  auto probe = probe_beta_zero(ch);
  if (!probe.feasible) {
    res.status = BoundStatus::infeasible;
    res.diagnostics["beta_zero_residual"] = probe.residual;
    return res;
  }
  BoundResult ce = ce_asymptotic(ch);
  {
    const CMatrix alpha = ce_alpha(ch, *ce.witness_h);
    const double anorm = std::max(op_norm(alpha), 1e-300);
    const CMatrix dev = alpha - (alpha.trace().real() / ch.d_in) * cidentity(ch.d_in);
    const double resid = op_norm(dev) / anorm;
    if (resid <= 1e-7) {
      res.value = ce.value;
      res.status = BoundStatus::exact;
      res.witness_h = ce.witness_h;
      res.diagnostics["alpha_residual"] = resid;
      return res;
    }
  }
  // stage (ii): penalty continuation with restarts
  detail::QsPenaltyWork work(ch);
  const Index nm = static_cast<Index>(work.gmats.size());
  std::mt19937_64 rng(0x51ab3c72u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const RVector theta_ce = h_to_coords(*ce.witness_h);
  double best_val = std::numeric_limits<double>::infinity();
  RVector best_theta;
  double best_res_b = 1.0, best_res_a = 1.0;
  for (int restart = 0; restart < 16; ++restart) {
    RVector theta = theta_ce;
    if (restart > 0) {
      const double spread = restart < 8 ? 0.3 : 2.0;
      for (Index i = 0; i < nm; ++i) theta(i) += spread * gauss(rng);
    }
    for (double mu : {1e0, 1e2, 1e4, 1e6, 1e8, 1e10}) {
      detail::lbfgs_minimize(
          [&](const RVector& t, RVector& g) { return work.eval(t, mu, &g); }, theta, 300);
    }
    work.polish(theta);
    auto [rb, ra] = work.residuals(theta);
    const double val = 4.0 * op_norm(work.dmat(theta).adjoint() * work.dmat(theta));
    const bool feas_now = std::max(rb, ra) <= 1e-6;
    const bool feas_best = std::max(best_res_b, best_res_a) <= 1e-6;
    const bool better = feas_now == feas_best ? (feas_now ? val < best_val
                                                          : std::max(rb, ra) <
                                                                std::max(best_res_b, best_res_a))
                                              : feas_now;
    if (better) {
      best_val = val;
      best_theta = theta;
      best_res_b = rb;
      best_res_a = ra;
    }
  }
  res.diagnostics["beta_residual"] = best_res_b;
  res.diagnostics["alpha_residual"] = best_res_a;
  if (std::max(best_res_b, best_res_a) <= 1e-6) {
    res.value = best_val;
    res.status = BoundStatus::upper_bound;
    res.witness_h = h_from_coords(best_theta, work.r);
  } else {
    res.status = BoundStatus::infeasible;
  }
  return res;
}

/// Closed-form asymptotic extension bound for the catalog (phase parameter).
inline double asymptotic_ce_closed(noise_kind kind, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) fail(errc::bad_parameter, "asymptotic_ce_closed: eta in [0,1)");
  switch (kind) {
    case noise_kind::dephasing: return eta * eta / (1.0 - eta * eta);
    case noise_kind::depolarization:
      return 2.0 * eta * eta / ((1.0 - eta) * (1.0 + 2.0 * eta));
    case noise_kind::loss: return eta / (1.0 - eta);
    case noise_kind::spontaneous_emission: return 4.0 * eta / (1.0 - eta);
  }
  fail(errc::bad_parameter, "asymptotic_ce_closed: unknown kind");
}

/// Closed finite-N law N F / (N + F) with F the asymptotic extension bound.
/// Not valid at N = 1 for spontaneous emission, where the program value is
/// the extended channel QFI instead.
inline double ce_finite_closed(noise_kind kind, double eta, long n_probes) {
  const long n_min = kind == noise_kind::spontaneous_emission ? 2 : 1;
  if (n_probes < n_min) fail(errc::bad_parameter, "ce_finite_closed: N below validity range");
  const double f = asymptotic_ce_closed(kind, eta);
  if (f == 0.0) return 0.0;
  return static_cast<double>(n_probes) * f / (static_cast<double>(n_probes) + f);
}

/// Asymptotic quantum precision enhancement factors sqrt(F_as / F) for the
/// bare and the ancilla-extended channel. The extended factor is fixed
/// exactly by the extension method; the bare factor is an upper bound except
/// for phase estimation under dephasing and loss, where matching strategies
/// are known.
inline std::pair<BoundResult, BoundResult> enhancement(const ParamChannel& ch) {
  BoundResult f = channel_qfi(ch);
  BoundResult fe = extended_qfi(ch);
  BoundResult fas = ce_asymptotic(ch);
  BoundResult un, ext;
  un.value = std::sqrt(fas.value / f.value);
  ext.value = std::sqrt(fas.value / fe.value);
  const bool attainable =
      ch.kind && ch.param == param_kind::phase &&
      (*ch.kind == noise_kind::dephasing || *ch.kind == noise_kind::loss);
  un.status = attainable ? BoundStatus::exact : BoundStatus::upper_bound;
  ext.status = BoundStatus::exact;
  un.diagnostics["channel_qfi"] = f.value;
  un.diagnostics["asymptotic_ce"] = fas.value;
  ext.diagnostics["extended_qfi"] = fe.value;
  ext.diagnostics["asymptotic_ce"] = fas.value;
  return {un, ext};
}

}  // namespace qmetro
