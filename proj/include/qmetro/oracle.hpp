// SPDX-License-Identifier: Apache-2.0
//
// Brute-force N-channel QFI: the exact output state of N parallel channel
// uses (optionally each extended by an ancilla), its analytic parameter
// derivative, and a seeded derivative-free input-state search. Ground truth
// for small N against which the bound constructions are sandwiched.
#pragma once

#include "qmetro/detail/optim.hpp"
#include "qmetro/fisher.hpp"

namespace qmetro {

struct NChannelInstance {
  ParamChannel channel;
  long n_probes = 1;
  bool extended = false;  // tensor an ancilla of dimension d_in onto each probe

  Index site_in() const { return channel.d_in * (extended ? channel.d_in : 1); }
  Index site_out() const { return channel.d_out * (extended ? channel.d_in : 1); }
  Index dim_in() const {
    Index d = 1;
    for (long i = 0; i < n_probes; ++i) d *= site_in();
    return d;
  }
  Index dim_out() const {
    Index d = 1;
    for (long i = 0; i < n_probes; ++i) d *= site_out();
    return d;
  }
};

namespace detail {

inline void guard_instance(const NChannelInstance& inst) {
  if (inst.n_probes < 1) fail(errc::bad_parameter, "oracle: N must be at least 1");
  double total = 1.0;
  for (long i = 0; i < inst.n_probes; ++i) {
    total *= static_cast<double>(inst.site_out());
    if (total > 4096.0)
      fail(errc::dimension_guard, "oracle: total output dimension exceeds the desk-scale cap");
  }
}

/// Apply a site-local operator to one tensor factor. dims lists the current
/// dimension of every site; site k changes from dims[k] to op.rows().
inline CVector apply_site(const CMatrix& op, const CVector& v, const std::vector<Index>& dims,
                          std::size_t k) {
  Index left = 1, right = 1;
  for (std::size_t i = 0; i < k; ++i) left *= dims[i];
  for (std::size_t i = k + 1; i < dims.size(); ++i) right *= dims[i];
  const Index din = dims[k], dout = op.rows();
  CVector out = CVector::Zero(left * dout * right);
  for (Index l = 0; l < left; ++l)
    for (Index o = 0; o < dout; ++o)
      for (Index i = 0; i < din; ++i) {
        const Complex c = op(o, i);
        if (c == Complex(0, 0)) continue;
        const Index src_base = (l * din + i) * right;
        const Index dst_base = (l * dout + o) * right;
        for (Index rgt = 0; rgt < right; ++rgt) out(dst_base + rgt) += c * v(src_base + rgt);
      }
  return out;
}

struct SiteOps {
  std::vector<CMatrix> k;   // K_i (x) I_anc
  std::vector<CMatrix> dk;  // dK_i (x) I_anc
};

inline SiteOps site_ops(const NChannelInstance& inst) {
  SiteOps ops;
  const CMatrix anc = cidentity(inst.channel.d_in);
  for (std::size_t i = 0; i < inst.channel.kraus.size(); ++i) {
    if (inst.extended) {
      ops.k.push_back(kron(inst.channel.kraus[i], anc));
      ops.dk.push_back(kron(inst.channel.dkraus[i], anc));
    } else {
      ops.k.push_back(inst.channel.kraus[i]);
      ops.dk.push_back(inst.channel.dkraus[i]);
    }
  }
  return ops;
}

}  // namespace detail

/// Exact output state rho = sum over Kraus multi-indices, with the derivative
/// accumulated by the product rule over which copy carries the derivative.
inline StatePair output_state(const NChannelInstance& inst, const CVector& psi_in) {
  detail::guard_instance(inst);
  require_valid(inst.channel, "output_state");
  if (psi_in.size() != inst.dim_in()) fail(errc::dimension_mismatch, "output_state input dimension");
  const auto ops = detail::site_ops(inst);
  const long n = inst.n_probes;
  const Index r = static_cast<Index>(ops.k.size());
  const Index dout = inst.dim_out();
  CMatrix rho = CMatrix::Zero(dout, dout);
  CMatrix drho = CMatrix::Zero(dout, dout);
  std::vector<Index> idx(n, 0);
  const std::vector<Index> in_dims(n, inst.site_in());
  for (;;) {
    // plain branch and the n derivative branches for this multi-index
    CVector v = psi_in;
    {
      std::vector<Index> dims = in_dims;
      for (long site = 0; site < n; ++site) {
        v = detail::apply_site(ops.k[idx[site]], v, dims, site);
        dims[site] = inst.site_out();
      }
    }
    CVector dv = CVector::Zero(dout);
    for (long dsite = 0; dsite < n; ++dsite) {
      CVector w = psi_in;
      std::vector<Index> dims = in_dims;
      for (long site = 0; site < n; ++site) {
        const CMatrix& op = site == dsite ? ops.dk[idx[site]] : ops.k[idx[site]];
        w = detail::apply_site(op, w, dims, site);
        dims[site] = inst.site_out();
      }
      dv += w;
    }
    rho += v * v.adjoint();
    drho += dv * v.adjoint() + v * dv.adjoint();
    long carry = n - 1;
    while (carry >= 0 && ++idx[carry] == r) idx[carry--] = 0;
    if (carry < 0) break;
  }
  return {rho, drho};
}

inline double brute_qfi(const NChannelInstance& inst, const CVector& psi_in) {
  return qfi(output_state(inst, psi_in));
}

/// (|0...0> + |1...1>)/sqrt(2) over n sites of local dimension d.
inline CVector ghz_state(long n, Index d = 2) {
  Index dim = 1;
  for (long i = 0; i < n; ++i) dim *= d;
  CVector v = CVector::Zero(dim);
  Index ones = 0;
  for (long i = 0; i < n; ++i) ones = ones * d + 1;
  v(0) = 1.0 / std::sqrt(2.0);
  v(ones) = 1.0 / std::sqrt(2.0);
  return v;
}

inline CVector product_state(const CVector& single, long n) {
  CVector v = single;
  for (long i = 1; i < n; ++i) {
    CVector next(v.size() * single.size());
    for (Index a = 0; a < v.size(); ++a)
      for (Index b = 0; b < single.size(); ++b) next(a * single.size() + b) = v(a) * single(b);
    v = next;
  }
  return v;
}

struct OracleOptimum {
  CVector psi;
  double value = 0.0;
  int restarts_used = 0;
};

/// Best N-probe input over seeded random restarts, each refined by compass
/// ascent; GHZ and the uniform product state are always included as
/// candidates, so the reported value is never below those strategies.
inline OracleOptimum optimize_input(const NChannelInstance& inst, int restarts = 32,
                                    std::uint64_t seed = 1) {
  detail::guard_instance(inst);
  require_valid(inst.channel, "optimize_input");
  auto value_at = [&](const CVector& psi) { return brute_qfi(inst, psi); };
  OracleOptimum best;
  best.value = -1.0;
  auto consider = [&](CVector psi) {
    const double refined = detail::compass_ascend_unit(value_at, psi);
    if (refined > best.value) {
      best.value = refined;
      best.psi = psi;
    }
  };
  // strategy seeds
  {
    const Index site = inst.site_in();
    CVector plus = CVector::Zero(site);
    plus(0) = 1.0 / std::sqrt(2.0);
    plus(site > 1 ? 1 : 0) = 1.0 / std::sqrt(2.0);
    plus /= plus.norm();
    consider(product_state(plus, inst.n_probes));
    consider(ghz_state(inst.n_probes, site));
  }
  std::mt19937_64 rng(seed);
  for (int rs = 0; rs < restarts; ++rs)
    consider(detail::random_unit_vector(inst.dim_in(), rng));
  best.restarts_used = restarts;
  return best;
}

/// Reference strategies: eta^{2N} N^2 under dephasing (GHZ input) and
/// eta^N N^2 under loss (N00N input).
inline double ghz_qfi(long n, double eta) {
  if (n < 1 || eta < 0.0 || eta > 1.0) fail(errc::bad_parameter, "ghz_qfi domain");
  return std::pow(eta, 2.0 * n) * static_cast<double>(n) * static_cast<double>(n);
}

inline double noon_qfi(long n, double eta) {
  if (n < 1 || eta < 0.0 || eta > 1.0) fail(errc::bad_parameter, "noon_qfi domain");
  return std::pow(eta, static_cast<double>(n)) * static_cast<double>(n) * static_cast<double>(n);
}

}  // namespace qmetro
