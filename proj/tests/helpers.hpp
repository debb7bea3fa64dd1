// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "qmetro/qmetro.hpp"

namespace testutil {

using namespace qmetro;

inline CMatrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  CMatrix m = random_complex(n, n, rng);
  return 0.5 * (m + m.adjoint().eval());
}

inline CMatrix random_psd(Index n, std::mt19937_64& rng) {
  CMatrix m = random_complex(n, n, rng);
  return m * m.adjoint();
}

inline CMatrix random_density(Index n, std::mt19937_64& rng) {
  CMatrix rho = random_psd(n, rng);
  return rho / rho.trace();
}

inline CVector random_ket(Index n, std::mt19937_64& rng) {
  CVector v = random_complex(n, 1, rng).col(0);
  return v / v.norm();
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testutil
