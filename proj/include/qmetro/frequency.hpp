// SPDX-License-Identifier: Apache-2.0
//
// Frequency estimation: every phase-estimation quantity F turns into a
// per-shot-duration figure f = max_t F(eta(t)) * t, with eta(t) fixed by the
// catalog Liouvillians. Closed forms for the catalog involve the principal
// branch of the Lambert W function.
#pragma once

#include <cmath>

#include "qmetro/bounds.hpp"

namespace qmetro {

/// Principal-branch Lambert W: w e^w = x for x >= -1/e. Halley iteration on
/// a series / logarithmic initial guess; residual below 1e-12.
inline double lambert_w0(double x) {
  constexpr double inv_e = 0.36787944117144233;
  if (x < -inv_e - 1e-12) fail(errc::domain_error, "lambert_w0: argument below -1/e");
  if (x < -inv_e) x = -inv_e;
  if (x == 0.0) return 0.0;
  double w;
  if (x < -0.3235) {
    const double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else if (x < 0.4) {
    w = x * (1.0 + x * (-1.0 + x * (1.5 - 8.0 / 3.0 * x)));
  } else if (x < 3.0) {
    w = 0.75 * std::log1p(x);
  } else {
    const double l1 = std::log(x), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 60; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= 1e-12 * (1.0 + std::abs(x))) break;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    if (denom == 0.0) break;
    w -= f / denom;
  }
  return w;
}

enum class freq_method { channel_qfi, extended_qfi, ce_finite, ce_asymptotic };

inline const char* to_string(freq_method m) {
  switch (m) {
    case freq_method::channel_qfi: return "channel-qfi";
    case freq_method::extended_qfi: return "ext-qfi";
    case freq_method::ce_finite: return "ce-finite";
    case freq_method::ce_asymptotic: return "ce-asymptotic";
  }
  return "?";
}

struct FreqResult {
  double value = 0.0;  // per-shot-duration QFI, units of time
  double t_opt = 0.0;
  freq_method method = freq_method::channel_qfi;
  long n_probes = 1;
  bool unimodal_grid = true;
};

namespace detail {

inline double phase_bound_value(noise_kind kind, freq_method method, double eta, long n) {
  ParamChannel ch = catalog(kind, param_kind::phase, 0.0, eta);
  switch (method) {
    case freq_method::channel_qfi: return channel_qfi(ch).value;
    case freq_method::extended_qfi: return extended_qfi(ch).value;
    case freq_method::ce_finite: return ce_finite(ch, n).value;
    case freq_method::ce_asymptotic: return ce_asymptotic(ch).value;
  }
  fail(errc::bad_parameter, "unknown frequency method");
}

}  // namespace detail

/// Maximize t * F(eta(t)) over the shot duration by a coarse logarithmic
/// grid followed by golden-section refinement. The grid also screens for
/// multimodality; when several local maxima appear the best grid point seeds
/// the refinement and the result is flagged.
inline FreqResult freq_bound(noise_kind kind, freq_method method, double gamma, long n_probes = 1,
                             double t_max = 0.0) {
  if (gamma <= 0.0) fail(errc::bad_parameter, "freq_bound: gamma must be positive");
  if (t_max == 0.0) t_max = 1e3 / gamma;
  if (t_max <= 0.0) fail(errc::bad_parameter, "freq_bound: t_max must be positive");
  auto f = [&](double t) {
    const double eta = eta_of_t(kind, gamma, t);
    // fully decohered tail: every catalog figure is below ~4 eta / (1 - eta),
    // so these shot durations contribute nothing to the maximum
    if (eta < 1e-7) return 0.0;
    return t * detail::phase_bound_value(kind, method, eta, n_probes);
  };
  constexpr int grid_n = 64;
  const double t_min = 1e-7 / gamma;
  std::vector<double> ts(grid_n), vs(grid_n);
  const double ratio = std::log(t_max / t_min) / (grid_n - 1);
  int best = 0;
  int n_local_max = 0;
  for (int i = 0; i < grid_n; ++i) {
    ts[i] = t_min * std::exp(ratio * i);
    vs[i] = f(ts[i]);
    if (vs[i] > vs[best]) best = i;
  }
  for (int i = 0; i < grid_n; ++i) {
    const bool up = i == 0 || vs[i] >= vs[i - 1];
    const bool down = i == grid_n - 1 || vs[i] >= vs[i + 1];
    if (up && down) ++n_local_max;
  }
  double lo = ts[std::max(0, best - 1)];
  double hi = ts[std::min(grid_n - 1, best + 1)];
  // golden-section to relative 1e-9 in t
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-9 * hi) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  FreqResult out;
  out.method = method;
  out.n_probes = n_probes;
  out.t_opt = f1 > f2 ? x1 : x2;
  out.value = std::max(f1, f2);
  if (vs[best] > out.value) {  // boundary optimum
    out.value = vs[best];
    out.t_opt = ts[best];
  }
  out.unimodal_grid = n_local_max <= 1;
  return out;
}

/// Closed forms of the per-shot-duration figures for the catalog. The
/// depolarization extended and finite-N entries have no analytic solution
/// and are evaluated from fitted constants (about 1% accurate); everything
/// else is exact.
inline double freq_closed(noise_kind kind, freq_method method, double gamma, long n_probes = 1) {
  if (gamma <= 0.0) fail(errc::bad_parameter, "freq_closed: gamma must be positive");
  const double e = std::exp(1.0);
  auto w_x = [&](double x, double n) { return 1.0 + lambert_w0((x - n) / (e * n)); };
  switch (kind) {
    case noise_kind::dephasing:
      switch (method) {
        case freq_method::channel_qfi:
        case freq_method::extended_qfi: return 1.0 / (2.0 * e * gamma);
        case freq_method::ce_asymptotic: return 1.0 / (2.0 * gamma);
        case freq_method::ce_finite: {
          const double n = static_cast<double>(n_probes);
          const double w = w_x(1.0, n);
          return (n / (2.0 * gamma)) * w / (1.0 + (std::exp(w) - 1.0) * n);
        }
      }
      break;
    case noise_kind::loss:
      switch (method) {
        case freq_method::channel_qfi:
        case freq_method::extended_qfi: return 1.0 / (e * gamma);
        case freq_method::ce_asymptotic: return 1.0 / gamma;
        case freq_method::ce_finite: {
          const double n = static_cast<double>(n_probes);
          const double w = w_x(1.0, n);
          return (n / gamma) * w / (1.0 + (std::exp(w) - 1.0) * n);
        }
      }
      break;
    case noise_kind::spontaneous_emission:
      switch (method) {
        case freq_method::channel_qfi: return 1.0 / (e * gamma);
        case freq_method::extended_qfi: {
          const double wt = 1.0 + 2.0 * lambert_w0(1.0 / (2.0 * std::sqrt(e)));
          const double s = 1.0 + std::exp(wt / 2.0);
          return 4.0 * wt / (gamma * s * s);
        }
        case freq_method::ce_asymptotic: return 4.0 / gamma;
        case freq_method::ce_finite: {
          if (n_probes < 2)
            fail(errc::bad_parameter, "freq_closed: finite-N law needs N >= 2 here");
          const double n = static_cast<double>(n_probes);
          const double w = w_x(4.0, n);
          return (n / gamma) * 4.0 * w / (4.0 + (std::exp(w) - 1.0) * n);
        }
      }
      break;
    case noise_kind::depolarization:
      switch (method) {
        case freq_method::channel_qfi: return 3.0 / (4.0 * e * gamma);
        case freq_method::extended_qfi: return 1.27 * 3.0 / (4.0 * e * gamma);  // approximate
        case freq_method::ce_asymptotic: return 1.0 / gamma;
        case freq_method::ce_finite: {
          // approximate: fitted constants alpha ~ 2.20, beta ~ 1.32
          const double alpha = 2.20, beta = 1.32;
          const double n = static_cast<double>(n_probes);
          const double w = w_x(beta, n);
          const double q = std::exp(alpha * w / 4.0);
          return (3.0 * n / (4.0 * gamma)) * alpha * w / (2.0 + (q - 1.0) * (q + 2.0) * n);
        }
      }
      break;
  }
  fail(errc::bad_parameter, "freq_closed: unsupported combination");
}

/// True when the closed form is a numerical approximation rather than exact.
inline bool freq_closed_is_approximate(noise_kind kind, freq_method method) {
  return kind == noise_kind::depolarization &&
         (method == freq_method::extended_qfi || method == freq_method::ce_finite);
}

/// Frequency estimation uncertainty over a total time budget:
/// (T * N * f)^{-1/2}, with the per-channel figure scaled by the probe count.
inline double freq_crlb(const FreqResult& fr, double t_total) {
  if (t_total <= 0.0) fail(errc::bad_parameter, "freq_crlb: total time must be positive");
  return 1.0 / std::sqrt(t_total * static_cast<double>(fr.n_probes) * fr.value);
}

}  // namespace qmetro
