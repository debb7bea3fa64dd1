// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"

using namespace qmetro;
using Catch::Matchers::WithinAbs;

namespace {
CVector plus_state() {
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}
}  // namespace

TEST_CASE("output_state basics", "[oracle]") {
  SECTION("identity channel is transparent") {
    ParamChannel id;
    id.d_in = id.d_out = 2;
    id.kraus = {cidentity(2)};
    id.dkraus = {CMatrix::Zero(2, 2)};
    std::mt19937_64 rng(53);
    CVector psi = testutil::random_ket(2, rng);
    StatePair s = output_state({id, 1, false}, psi);
    REQUIRE(op_norm(CMatrix(s.rho - psi * psi.adjoint())) <= 1e-14);
    REQUIRE(op_norm(s.drho) <= 1e-14);
  }
  SECTION("product inputs add information") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.8);
    StatePair s = output_state({ch, 2, false}, product_state(plus_state(), 2));
    REQUIRE_THAT(qfi(s), WithinAbs(2.0 * 0.64, 1e-10));
  }
  SECTION("entangled input under dephasing") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.9);
    const double got = brute_qfi({ch, 2, false}, ghz_state(2));
    REQUIRE_THAT(got, WithinAbs(4.0 * std::pow(0.9, 4), 1e-10));
  }
  SECTION("dimension guard") {
    ParamChannel ch = catalog(noise_kind::loss, param_kind::phase, 0.0, 0.9);
    REQUIRE_THROWS_AS(output_state({ch, 9, false}, CVector::Zero(512)), error);
  }
}

TEST_CASE("strategy formulas", "[oracle]") {
  REQUIRE_THAT(ghz_qfi(1, 0.9), WithinAbs(0.81, 1e-14));
  REQUIRE_THAT(ghz_qfi(3, 1.0), WithinAbs(9.0, 1e-14));
  REQUIRE_THAT(noon_qfi(3, 0.9), WithinAbs(6.561, 1e-12));
  SECTION("brute force validates them") {
    ParamChannel dephc = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.9);
    for (long n = 1; n <= 3; ++n)
      REQUIRE_THAT(brute_qfi({dephc, n, false}, ghz_state(n)), WithinAbs(ghz_qfi(n, 0.9), 1e-9));
    ParamChannel lossc = catalog(noise_kind::loss, param_kind::phase, 0.0, 0.9);
    for (long n = 1; n <= 3; ++n)
      REQUIRE_THAT(brute_qfi({lossc, n, false}, ghz_state(n)), WithinAbs(noon_qfi(n, 0.9), 1e-9));
  }
}

TEST_CASE("permutation symmetry of the probe factors", "[oracle]") {
  ParamChannel ch = catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.7);
  std::mt19937_64 rng(59);
  CVector psi = testutil::random_ket(4, rng);
  // swap the two probe factors
  CVector swapped(4);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b) swapped(b * 2 + a) = psi(a * 2 + b);
  REQUIRE_THAT(brute_qfi({ch, 2, false}, psi), WithinAbs(brute_qfi({ch, 2, false}, swapped), 1e-10));
}

TEST_CASE("optimize_input finds the known optima", "[oracle]") {
  SECTION("single dephasing channel") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.9);
    OracleOptimum best = optimize_input({ch, 1, false}, 8, 2);
    REQUIRE_THAT(best.value, WithinAbs(0.81, 1e-6));
  }
  SECTION("extended spontaneous emission reaches the extended channel QFI") {
    ParamChannel ch = catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.9);
    OracleOptimum best = optimize_input({ch, 1, true}, 8, 2);
    const double want = 4.0 * 0.9 / std::pow(1.0 + std::sqrt(0.9), 2);
    REQUIRE_THAT(best.value, WithinAbs(want, 1e-5));
  }
  SECTION("never below the seeded strategies") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.9);
    OracleOptimum best = optimize_input({ch, 2, false}, 4, 2);
    REQUIRE(best.value >= ghz_qfi(2, 0.9) - 1e-9);
    REQUIRE(best.value >= 2.0 * 0.81 - 1e-9);
  }
  SECTION("extension monotonicity") {
    ParamChannel ch = catalog(noise_kind::depolarization, param_kind::phase, 0.0, 0.8);
    const double un = optimize_input({ch, 1, false}, 6, 3).value;
    const double ext = optimize_input({ch, 1, true}, 6, 3).value;
    REQUIRE(ext >= un - 1e-6);
  }
  SECTION("deterministic for a fixed seed") {
    ParamChannel ch = catalog(noise_kind::loss, param_kind::phase, 0.0, 0.8);
    const double a = optimize_input({ch, 2, false}, 4, 11).value;
    const double b = optimize_input({ch, 2, false}, 4, 11).value;
    REQUIRE(a == b);
  }
}

TEST_CASE("oracle values respect the finite-N cap", "[oracle]") {
  for (noise_kind k : {noise_kind::dephasing, noise_kind::loss}) {
    ParamChannel ch = catalog(k, param_kind::phase, 0.0, 0.9);
    for (long n = 1; n <= 2; ++n) {
      const double opt = optimize_input({ch, n, false}, 6, 5).value;
      const double cap = static_cast<double>(n) * ce_finite(ch, n).value;
      REQUIRE(opt <= cap + 1e-6);
    }
  }
}
