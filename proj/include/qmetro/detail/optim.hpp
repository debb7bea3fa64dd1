// SPDX-License-Identifier: Apache-2.0
//
// Deterministic derivative-free and quasi-Newton helpers shared by the bound
// engines and the brute-force oracle. All randomness flows through caller
// seeds.
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <random>
#include <vector>

#include "qmetro/matkit.hpp"

namespace qmetro::detail {

/// Nelder-Mead minimization in R^k; returns the best vertex found.
inline RVector nelder_mead(const std::function<double(const RVector&)>& f, RVector start,
                           double initial_step, double param_tol, int max_iter = 400) {
  const Index k = start.size();
  std::vector<std::pair<double, RVector>> simplex;
  simplex.reserve(k + 1);
  simplex.emplace_back(f(start), start);
  for (Index i = 0; i < k; ++i) {
    RVector v = start;
    v(i) += initial_step;
    simplex.emplace_back(f(v), v);
  }
  auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };
  for (int it = 0; it < max_iter; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    double spread = 0.0;
    for (Index i = 1; i <= k; ++i)
      spread = std::max(spread, (simplex[i].second - simplex[0].second).norm());
    if (spread < param_tol) break;
    RVector centroid = RVector::Zero(k);
    for (Index i = 0; i < k; ++i) centroid += simplex[i].second;
    centroid /= static_cast<double>(k);
    const RVector& worst = simplex[k].second;
    RVector refl = centroid + (centroid - worst);
    const double fr = f(refl);
    if (fr < simplex[0].first) {
      RVector exp_pt = centroid + 2.0 * (centroid - worst);
      const double fe = f(exp_pt);
      simplex[k] = fe < fr ? std::make_pair(fe, exp_pt) : std::make_pair(fr, refl);
    } else if (fr < simplex[k - 1].first) {
      simplex[k] = {fr, refl};
    } else {
      RVector contr = centroid + 0.5 * (worst - centroid);
      const double fc = f(contr);
      if (fc < simplex[k].first) {
        simplex[k] = {fc, contr};
      } else {
        for (Index i = 1; i <= k; ++i) {
          RVector v = simplex[0].second + 0.5 * (simplex[i].second - simplex[0].second);
          simplex[i] = {f(v), v};
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex[0].second;
}

inline CVector random_unit_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  v /= v.norm();
  return v;
}

/// Greedy compass ascent of f over the complex unit sphere: perturb one real
/// or imaginary component at a time, renormalize, accept improvements, halve
/// the step on full-cycle failure. Stops at relative step rel_tol.
inline double compass_ascend_unit(const std::function<double(const CVector&)>& f, CVector& psi,
                                  double rel_tol = 1e-7) {
  double best = f(psi);
  double step = 0.35;
  const Index dim = psi.size();
  while (step > rel_tol) {
    bool improved = false;
    for (Index i = 0; i < dim; ++i) {
      for (int part = 0; part < 2; ++part) {
        const Complex delta = part == 0 ? Complex(step, 0) : Complex(0, step);
        for (int sign = -1; sign <= 1; sign += 2) {
          CVector cand = psi;
          cand(i) += double(sign) * delta;
          const double nrm = cand.norm();
          if (nrm < 1e-12) continue;
          cand /= nrm;
          const double v = f(cand);
          if (v > best * (1.0 + 1e-15) + 1e-300) {
            best = v;
            psi = cand;
            improved = true;
            // ride the same direction while it keeps paying
            for (int rep = 0; rep < 50; ++rep) {
              CVector more = psi;
              more(i) += double(sign) * delta;
              more /= more.norm();
              const double vm = f(more);
              if (vm <= best) break;
              best = vm;
              psi = more;
            }
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

/// Limited-memory BFGS minimization with Armijo backtracking.
/// fg must return f and fill grad.
inline double lbfgs_minimize(const std::function<double(const RVector&, RVector&)>& fg,
                             RVector& x, int max_iter = 400, double grad_tol = 1e-12) {
  const Index n = x.size();
  std::deque<RVector> s_hist, y_hist;
  std::deque<double> rho_hist;
  RVector g(n), g_new(n);
  double fx = fg(x, g);
  for (int it = 0; it < max_iter; ++it) {
    if (g.norm() <= grad_tol * (1.0 + std::abs(fx))) break;
    // two-loop recursion
    RVector q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / std::max(1e-300, y_hist.back().squaredNorm());
      q *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    RVector dir = -q;
    double slope = g.dot(dir);
    if (slope >= 0.0) {  // fall back to steepest descent
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    double f_new = fx;
    RVector x_new = x;
    bool ok = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + step * dir;
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    RVector s = x_new - x;
    RVector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > 10) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    g = g_new;
    const double df = fx - f_new;
    fx = f_new;
    if (df <= 1e-16 * (1.0 + std::abs(fx)) && g.norm() <= 1e-9 * (1.0 + std::abs(fx))) break;
  }
  return fx;
}

}  // namespace qmetro::detail
