// SPDX-License-Identifier: Apache-2.0
//
// Quantum channels at a parameter point: a list of Kraus operators together
// with their parameter derivatives. The built-in catalog covers dephasing,
// depolarization, loss (2 -> 3 dimensional) and spontaneous emission, each
// available with the estimated parameter being either the phase of a
// commuting z-rotation or the decoherence strength eta itself.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmetro/matkit.hpp"

namespace qmetro {

enum class param_kind { phase, strength, frequency_time };
enum class noise_kind { dephasing, depolarization, loss, spontaneous_emission };

inline const char* to_string(param_kind p) {
  switch (p) {
    case param_kind::phase: return "phase";
    case param_kind::strength: return "strength";
    case param_kind::frequency_time: return "frequency-time";
  }
  return "?";
}

inline const char* to_string(noise_kind k) {
  switch (k) {
    case noise_kind::dephasing: return "dephasing";
    case noise_kind::depolarization: return "depolarization";
    case noise_kind::loss: return "loss";
    case noise_kind::spontaneous_emission: return "spontaneous-emission";
  }
  return "?";
}

inline noise_kind noise_kind_from_string(const std::string& s) {
  if (s == "dephasing") return noise_kind::dephasing;
  if (s == "depolarization" || s == "depolarizing") return noise_kind::depolarization;
  if (s == "loss") return noise_kind::loss;
  if (s == "spontaneous-emission" || s == "spontaneous_emission" || s == "amplitude-damping")
    return noise_kind::spontaneous_emission;
  fail(errc::bad_parameter, "unknown channel kind '" + s + "'");
}

inline param_kind param_kind_from_string(const std::string& s) {
  if (s == "phase") return param_kind::phase;
  if (s == "strength") return param_kind::strength;
  if (s == "frequency-time" || s == "frequency_time") return param_kind::frequency_time;
  fail(errc::bad_parameter, "unknown parameter tag '" + s + "'");
}

/// A channel at a single parameter point: Kraus operators K_i (d_out x d_in)
/// and their derivatives dK_i with respect to the estimated parameter.
struct ParamChannel {
  Index d_in = 0;
  Index d_out = 0;
  std::vector<CMatrix> kraus;
  std::vector<CMatrix> dkraus;
  param_kind param = param_kind::phase;
  double param_value = 0.0;
  double noise_value = 1.0;  // eta where applicable
  std::optional<noise_kind> kind;

  Index rank() const { return static_cast<Index>(kraus.size()); }
};

/// Choi matrix Omega = sum_i |K_i><K_i| and its parameter derivative.
struct ChoiPair {
  CMatrix omega;   // Hermitian PSD, trace d_in
  CMatrix domega;  // Hermitian, trace 0
};

namespace detail {

inline CMatrix kraus_stack(const std::vector<CMatrix>& ms) {
  if (ms.empty()) return CMatrix(0, 0);
  const Index rows = ms[0].rows(), cols = ms[0].cols();
  CMatrix s(rows * static_cast<Index>(ms.size()), cols);
  for (Index i = 0; i < static_cast<Index>(ms.size()); ++i) s.block(i * rows, 0, rows, cols) = ms[i];
  return s;
}

inline CMatrix gram(const std::vector<CMatrix>& ks) {
  const Index r = static_cast<Index>(ks.size());
  CMatrix g(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) g(i, j) = (ks[i].adjoint() * ks[j]).trace();
  return g;
}

}  // namespace detail

inline CMatrix cptp_defect(const ParamChannel& ch) {
  CMatrix s = CMatrix::Zero(ch.d_in, ch.d_in);
  for (const auto& k : ch.kraus) s += k.adjoint() * k;
  return s - cidentity(ch.d_in);
}

inline CMatrix derivative_defect(const ParamChannel& ch) {
  CMatrix s = CMatrix::Zero(ch.d_in, ch.d_in);
  for (std::size_t i = 0; i < ch.kraus.size(); ++i)
    s += ch.dkraus[i].adjoint() * ch.kraus[i] + ch.kraus[i].adjoint() * ch.dkraus[i];
  return s;
}

/// Empty list iff the channel satisfies all structural invariants:
/// matching dimensions, CPTP, derivative of the CPTP condition, and linear
/// independence of the Kraus operators.
inline std::vector<std::string> validate(const ParamChannel& ch) {
  std::vector<std::string> bad;
  if (ch.d_in <= 0 || ch.d_out <= 0) bad.push_back("dimensions must be positive");
  if (ch.kraus.empty()) bad.push_back("no Kraus operators");
  if (ch.kraus.size() != ch.dkraus.size()) bad.push_back("kraus/dkraus length mismatch");
  if (!bad.empty()) return bad;
  for (const auto& k : ch.kraus)
    if (k.rows() != ch.d_out || k.cols() != ch.d_in) {
      bad.push_back("Kraus operator shape mismatch");
      return bad;
    }
  for (const auto& k : ch.dkraus)
    if (k.rows() != ch.d_out || k.cols() != ch.d_in) {
      bad.push_back("Kraus derivative shape mismatch");
      return bad;
    }
  if (op_norm(cptp_defect(ch)) > 1e-10)
    bad.push_back("CPTP violation: sum K^dag K differs from identity");
  if (op_norm(derivative_defect(ch)) > 1e-10)
    bad.push_back("derivative consistency violation: sum (dK^dag K + K^dag dK) != 0");
  auto ge = herm_eig(detail::gram(ch.kraus));
  const double gmax = ge.eigenvalues.maxCoeff();
  if (gmax <= 0.0 || ge.eigenvalues.minCoeff() <= 1e-10 * gmax)
    bad.push_back("Kraus operators are not linearly independent");
  return bad;
}

inline void require_valid(const ParamChannel& ch, const char* where) {
  auto bad = validate(ch);
  if (!bad.empty()) fail(errc::bad_parameter, std::string(where) + ": invalid channel: " + bad.front());
}

/// Decoherence strength as a function of evolution time for the catalog
/// Liouvillians: exp(-gamma t), except depolarization with exp(-2 gamma t/3).
inline double eta_of_t(noise_kind kind, double gamma, double t) {
  if (gamma <= 0.0) fail(errc::bad_parameter, "eta_of_t: rate gamma must be positive");
  if (t < 0.0) fail(errc::bad_parameter, "eta_of_t: time must be non-negative");
  switch (kind) {
    case noise_kind::depolarization: return std::exp(-2.0 * gamma * t / 3.0);
    default: return std::exp(-gamma * t);
  }
}

namespace detail {

// Noise-only Kraus operators D_i(eta) and their eta-derivatives.
inline void noise_kraus(noise_kind kind, double eta, std::vector<CMatrix>& d,
                        std::vector<CMatrix>& ddeta) {
  d.clear();
  ddeta.clear();
  switch (kind) {
    case noise_kind::dephasing: {
      d.push_back(std::sqrt((1.0 + eta) / 2.0) * cidentity(2));
      d.push_back(std::sqrt((1.0 - eta) / 2.0) * pauli(3));
      ddeta.push_back(cidentity(2) / (2.0 * std::sqrt(2.0 * (1.0 + eta))));
      ddeta.push_back(-pauli(3) / (2.0 * std::sqrt(2.0 * (1.0 - eta))));
      break;
    }
    case noise_kind::depolarization: {
      d.push_back(std::sqrt((1.0 + 3.0 * eta) / 4.0) * cidentity(2));
      ddeta.push_back(1.5 * cidentity(2) / (2.0 * std::sqrt((1.0 + 3.0 * eta))));
      for (int k = 1; k <= 3; ++k) {
        d.push_back(std::sqrt((1.0 - eta) / 4.0) * pauli(k));
        ddeta.push_back(-pauli(k) / (4.0 * std::sqrt(1.0 - eta)));
      }
      break;
    }
    case noise_kind::loss: {
      CMatrix k1 = CMatrix::Zero(3, 2), k2 = CMatrix::Zero(3, 2), k3 = CMatrix::Zero(3, 2);
      k1(2, 1) = std::sqrt(1.0 - eta);
      k2(2, 0) = std::sqrt(1.0 - eta);
      k3(0, 0) = k3(1, 1) = std::sqrt(eta);
      d = {k1, k2, k3};
      CMatrix dk1 = CMatrix::Zero(3, 2), dk2 = CMatrix::Zero(3, 2), dk3 = CMatrix::Zero(3, 2);
      dk1(2, 1) = -0.5 / std::sqrt(1.0 - eta);
      dk2(2, 0) = -0.5 / std::sqrt(1.0 - eta);
      dk3(0, 0) = dk3(1, 1) = 0.5 / std::sqrt(eta);
      ddeta = {dk1, dk2, dk3};
      break;
    }
    case noise_kind::spontaneous_emission: {
      CMatrix k1 = CMatrix::Zero(2, 2), k2 = CMatrix::Zero(2, 2);
      k1(0, 0) = 1.0;
      k1(1, 1) = std::sqrt(eta);
      k2(0, 1) = std::sqrt(1.0 - eta);
      d = {k1, k2};
      CMatrix dk1 = CMatrix::Zero(2, 2), dk2 = CMatrix::Zero(2, 2);
      dk1(1, 1) = 0.5 / std::sqrt(eta);
      dk2(0, 1) = -0.5 / std::sqrt(1.0 - eta);
      ddeta = {dk1, dk2};
      break;
    }
  }
}

}  // namespace detail

/// Phase rotation on the channel output space. For the loss channel the
/// 3-dimensional output rotates the two particle modes and leaves the vacuum
/// mode alone; the generator is returned by phase_generator below.
inline CMatrix phase_unitary(noise_kind kind, double phi) {
  if (kind == noise_kind::loss) {
    CMatrix u = CMatrix::Zero(3, 3);
    u(0, 0) = std::exp(IM * phi / 2.0);
    u(1, 1) = std::exp(-IM * phi / 2.0);
    u(2, 2) = 1.0;
    return u;
  }
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = std::exp(IM * phi / 2.0);
  u(1, 1) = std::exp(-IM * phi / 2.0);
  return u;
}

/// Hermitian generator of phase_unitary: U(phi) = exp(i G phi).
inline CMatrix phase_generator(noise_kind kind) {
  if (kind == noise_kind::loss) {
    CMatrix g = CMatrix::Zero(3, 3);
    g(0, 0) = 0.5;
    g(1, 1) = -0.5;
    return g;
  }
  return 0.5 * pauli(3);
}

/// Catalog channels. For param = phase, K_i(phi) = U_phi D_i(eta) with
/// dK_i = i G K_i; for param = strength, K_i = D_i(eta) at phi = 0 with
/// dK_i = dD_i/deta.
inline ParamChannel catalog(noise_kind kind, param_kind param, double phi, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) fail(errc::bad_parameter, "catalog: eta must lie in [0, 1)");
  ParamChannel ch;
  ch.kind = kind;
  ch.param = param;
  ch.noise_value = eta;
  ch.d_in = 2;
  ch.d_out = (kind == noise_kind::loss) ? 3 : 2;
  std::vector<CMatrix> d, ddeta;
  if (param == param_kind::strength) {
    if (phi != 0.0) fail(errc::bad_parameter, "catalog: strength channels are defined at phi = 0");
    if (eta == 0.0 && (kind == noise_kind::loss || kind == noise_kind::spontaneous_emission))
      fail(errc::bad_parameter, "catalog: strength derivative diverges at eta = 0 for this kind");
    detail::noise_kraus(kind, eta, d, ddeta);
    ch.kraus = d;
    ch.dkraus = ddeta;
    ch.param_value = eta;
    return ch;
  }
  if (param != param_kind::phase) fail(errc::bad_parameter, "catalog: use phase or strength");
  detail::noise_kraus(kind, eta, d, ddeta);
  const CMatrix u = phase_unitary(kind, phi);
  const CMatrix g = phase_generator(kind);
  ch.param_value = phi;
  for (const auto& di : d) {
    CMatrix k = u * di;
    ch.kraus.push_back(k);
    ch.dkraus.push_back(IM * g * k);
  }
  return ch;
}

/// Rescale a phase-parameterized channel into frequency units: the estimated
/// parameter becomes the detuning omega at fixed shot duration t, so the
/// derivative picks up a factor t via phi = omega * t.
inline ParamChannel catalog_frequency(noise_kind kind, double gamma, double omega, double t) {
  ParamChannel ch = catalog(kind, param_kind::phase, omega * t, eta_of_t(kind, gamma, t));
  ch.param = param_kind::frequency_time;
  ch.param_value = omega;
  for (auto& dk : ch.dkraus) dk *= t;
  return ch;
}

inline ChoiPair choi(const ParamChannel& ch) {
  const Index dim = ch.d_out * ch.d_in;
  ChoiPair cp{CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim)};
  for (std::size_t i = 0; i < ch.kraus.size(); ++i) {
    const CVector k = vec(ch.kraus[i]);
    const CVector dk = vec(ch.dkraus[i]);
    cp.omega += k * k.adjoint();
    cp.domega += dk * k.adjoint() + k * dk.adjoint();
  }
  return cp;
}

/// Re-gauge the Kraus derivatives by a local representation rotation
/// generated by a Hermitian r x r matrix h: dK_i -> dK_i - i sum_j h_ij K_j.
/// The channel map and its derivative as a map are unchanged.
inline ParamChannel rotate_local(const ParamChannel& ch, const CMatrix& h) {
  const Index r = ch.rank();
  if (h.rows() != r || h.cols() != r)
    fail(errc::dimension_mismatch, "rotate_local: h must be rank x rank");
  if (!is_hermitian(h)) fail(errc::non_hermitian_input, "rotate_local: h must be Hermitian");
  ParamChannel out = ch;
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) out.dkraus[i] -= IM * h(i, j) * ch.kraus[j];
  return out;
}

/// Parallel composition of two channels at the same parameter point:
/// Kraus set {K_i (x) L_j} with product-rule derivatives.
inline ParamChannel tensor(const ParamChannel& a, const ParamChannel& b) {
  if (a.param != b.param || std::abs(a.param_value - b.param_value) > 1e-12)
    fail(errc::parameter_mismatch, "tensor: channels must share the parameter tag and value");
  ParamChannel out;
  out.d_in = a.d_in * b.d_in;
  out.d_out = a.d_out * b.d_out;
  out.param = a.param;
  out.param_value = a.param_value;
  out.noise_value = a.noise_value;
  for (std::size_t i = 0; i < a.kraus.size(); ++i)
    for (std::size_t j = 0; j < b.kraus.size(); ++j) {
      out.kraus.push_back(kron(a.kraus[i], b.kraus[j]));
      out.dkraus.push_back(kron(a.dkraus[i], b.kraus[j]) + kron(a.kraus[i], b.dkraus[j]));
    }
  return out;
}

/// Channel from Kraus operators sampled around the working point; derivatives
/// by central differences. The sampler must return a consistently gauged
/// representation for nearby parameter values.
inline ParamChannel finite_difference_channel(
    const std::function<std::vector<CMatrix>(double)>& kraus_at, double at, double step = 1e-5,
    param_kind param = param_kind::phase) {
  if (step <= 0.0) fail(errc::bad_parameter, "finite_difference_channel: step must be positive");
  auto k0 = kraus_at(at);
  auto kp = kraus_at(at + step);
  auto km = kraus_at(at - step);
  if (k0.empty() || kp.size() != k0.size() || km.size() != k0.size())
    fail(errc::bad_parameter, "finite_difference_channel: inconsistent sample lists");
  ParamChannel ch;
  ch.d_out = k0[0].rows();
  ch.d_in = k0[0].cols();
  ch.param = param;
  ch.param_value = at;
  ch.kraus = k0;
  for (std::size_t i = 0; i < k0.size(); ++i) ch.dkraus.push_back((kp[i] - km[i]) / (2.0 * step));
  return ch;
}

/// Drop null directions of the Kraus Gram matrix. Only representations whose
/// dropped directions also carry vanishing derivatives can be compressed;
/// anything else is reported as a violation by validate().
inline ParamChannel compress(const ParamChannel& ch) {
  const Index r = ch.rank();
  auto ge = herm_eig(detail::gram(ch.kraus));
  const double gmax = std::max(0.0, ge.eigenvalues.maxCoeff());
  ParamChannel out = ch;
  out.kraus.clear();
  out.dkraus.clear();
  for (Index a = 0; a < r; ++a) {
    CMatrix k = CMatrix::Zero(ch.d_out, ch.d_in);
    CMatrix dk = CMatrix::Zero(ch.d_out, ch.d_in);
    for (Index i = 0; i < r; ++i) {
      const Complex w = std::conj(ge.eigenvectors(i, a));
      k += w * ch.kraus[i];
      dk += w * ch.dkraus[i];
    }
    if (ge.eigenvalues(a) > 1e-10 * gmax) {
      out.kraus.push_back(k);
      out.dkraus.push_back(dk);
    } else if (dk.norm() > 1e-8 * (1.0 + k.norm())) {
      fail(errc::bad_parameter,
           "compress: null Kraus direction carries a non-vanishing derivative");
    }
  }
  return out;
}

}  // namespace qmetro
