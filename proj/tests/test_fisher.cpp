// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"

using namespace qmetro;
using Catch::Matchers::WithinAbs;

TEST_CASE("classical_fi", "[fisher]") {
  SECTION("binary phase distribution carries unit information") {
    const double phi = M_PI / 3.0;
    RVector p(2), dp(2);
    p << std::cos(phi / 2) * std::cos(phi / 2), std::sin(phi / 2) * std::sin(phi / 2);
    dp << -0.5 * std::sin(phi), 0.5 * std::sin(phi);
    REQUIRE_THAT(classical_fi(p, dp), WithinAbs(1.0, 1e-12));
  }
  SECTION("constant distribution carries none") {
    RVector p(3), dp(3);
    p << 0.2, 0.3, 0.5;
    dp << 0, 0, 0;
    REQUIRE_THAT(classical_fi(p, dp), WithinAbs(0.0, 1e-15));
  }
  SECTION("two-point mixing distribution") {
    const double ep = 0.31, em = 1.7;
    RVector p(2), dp(2);
    p << em / (ep + em), ep / (ep + em);
    dp << 1.0 / (ep + em), -1.0 / (ep + em);
    REQUIRE_THAT(classical_fi(p, dp), WithinAbs(1.0 / (ep * em), 1e-12));
  }
  SECTION("derivative mass on a dead outcome") {
    RVector p(2), dp(2);
    p << 1.0, 0.0;
    dp << -1e-3, 1e-3;
    REQUIRE_THROWS_AS(classical_fi(p, dp), error);
  }
}

TEST_CASE("sld and qfi", "[fisher]") {
  SECTION("zero derivative") {
    StatePair s = make_state_pair(CMatrix(0.5 * cidentity(2)), CMatrix::Zero(2, 2));
    REQUIRE(op_norm(sld(s)) <= 1e-14);
    REQUIRE_THAT(qfi(s), WithinAbs(0.0, 1e-14));
  }
  SECTION("maximally mixed state with transverse drift") {
    StatePair s = make_state_pair(CMatrix(0.5 * cidentity(2)), CMatrix(0.25 * pauli(1)));
    REQUIRE(op_norm(CMatrix(sld(s) - 0.5 * pauli(1))) <= 1e-12);
  }
  SECTION("dephased equatorial qubit reproduces eta squared") {
    const double eta = 0.8;
    CMatrix rho = 0.5 * (cidentity(2) + eta * pauli(1));
    CMatrix drho = 0.5 * eta * pauli(2);
    StatePair s = make_state_pair(rho, drho);
    REQUIRE_THAT(qfi(s), WithinAbs(eta * eta, 1e-12));
  }
  SECTION("defining relation holds on random full-rank states") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
      const Index n = 2 + trial % 3;
      CMatrix rho = testutil::random_density(n, rng);
      CMatrix a = testutil::random_hermitian(n, rng);
      CMatrix drho = a - (a.trace().real() / n) * cidentity(n);
      StatePair s = make_state_pair(rho, drho);
      CMatrix l = sld(s);
      REQUIRE(op_norm(CMatrix(s.drho - 0.5 * (s.rho * l + l * s.rho))) <= 1e-8);
      REQUIRE_THAT(qfi(s), WithinAbs((s.rho * l * l).trace().real(), 1e-9));
    }
  }
}

TEST_CASE("qfi_pure", "[fisher]") {
  std::mt19937_64 rng(29);
  SECTION("global phase carries nothing") {
    CVector psi = testutil::random_ket(3, rng);
    CVector dpsi = IM * 0.7 * psi;
    REQUIRE_THAT(qfi_pure(psi, dpsi), WithinAbs(0.0, 1e-12));
  }
  SECTION("entangled collective rotation reaches the quadratic scaling") {
    for (long n : {2L, 3L, 4L}) {
      const Index dim = Index(1) << n;
      CVector ghz = CVector::Zero(dim);
      ghz(0) = ghz(dim - 1) = 1.0 / std::sqrt(2.0);
      // collective half-spin z generator
      CVector diag(dim);
      for (Index b = 0; b < dim; ++b) {
        int ones = 0;
        for (long q = 0; q < n; ++q) ones += (b >> q) & 1;
        diag(b) = 0.5 * (n - 2 * ones);
      }
      CVector dpsi(dim);
      for (Index b = 0; b < dim; ++b) dpsi(b) = -IM * diag(b) * ghz(b);
      REQUIRE_THAT(qfi_pure(ghz, dpsi), WithinAbs(double(n) * double(n), 1e-10));
    }
  }
  SECTION("agrees with the mixed-state route on rank-one pairs") {
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = 2 + trial % 4;
      CVector psi = testutil::random_ket(n, rng);
      CVector raw = testutil::random_ket(n, rng);
      // remove the real overlap so the family stays normalized
      CVector dpsi = raw - psi * Complex((psi.adjoint() * raw)(0, 0).real(), 0);
      CMatrix rho = psi * psi.adjoint();
      CMatrix drho = dpsi * psi.adjoint() + psi * dpsi.adjoint();
      StatePair s{rho, drho};
      REQUIRE_THAT(qfi_pure(psi, dpsi), WithinAbs(qfi(s), 1e-8));
    }
  }
}

TEST_CASE("rld_qfi", "[fisher]") {
  SECTION("dephased qubit closed form") {
    const double eta = 0.8;
    StatePair s = make_state_pair(CMatrix(0.5 * (cidentity(2) + eta * pauli(1))),
                                  CMatrix(0.5 * eta * pauli(2)));
    REQUIRE_THAT(rld_qfi(s), WithinAbs(eta * eta / (1.0 - eta * eta), 1e-10));
  }
  SECTION("support violation on a pure state") {
    CVector e0 = CVector::Zero(2);
    e0(0) = 1.0;
    CMatrix rho = e0 * e0.adjoint();
    StatePair s{rho, CMatrix(pauli(1))};
    REQUIRE_THROWS_AS(rld_qfi(s), error);
  }
  SECTION("zero derivative") {
    StatePair s = make_state_pair(CMatrix(0.5 * cidentity(2)), CMatrix::Zero(2, 2));
    REQUIRE_THAT(rld_qfi(s), WithinAbs(0.0, 1e-14));
  }
  SECTION("dominates the QFI on random full-rank qubit pairs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      CMatrix rho = testutil::random_density(2, rng);
      CMatrix a = testutil::random_hermitian(2, rng);
      CMatrix drho = a - (a.trace().real() / 2) * cidentity(2);
      StatePair s = make_state_pair(rho, drho);
      REQUIRE(qfi(s) <= rld_qfi(s) + 1e-8);
    }
  }
}

TEST_CASE("qfi additivity and convexity", "[fisher]") {
  std::mt19937_64 rng(37);
  SECTION("additive on product states") {
    for (int trial = 0; trial < 10; ++trial) {
      CMatrix rho_a = testutil::random_density(2, rng);
      CMatrix rho_b = testutil::random_density(3, rng);
      CMatrix ha = testutil::random_hermitian(2, rng);
      CMatrix hb = testutil::random_hermitian(3, rng);
      CMatrix da = ha - (ha.trace().real() / 2) * cidentity(2);
      CMatrix db = hb - (hb.trace().real() / 3) * cidentity(3);
      StatePair joint{kron(rho_a, rho_b), kron(da, rho_b) + kron(rho_a, db)};
      REQUIRE_THAT(qfi(joint), WithinAbs(qfi({rho_a, da}) + qfi({rho_b, db}), 1e-8));
    }
  }
  SECTION("convex under mixing") {
    for (int trial = 0; trial < 50; ++trial) {
      CMatrix r1 = testutil::random_density(2, rng);
      CMatrix r2 = testutil::random_density(2, rng);
      CMatrix h1 = testutil::random_hermitian(2, rng);
      CMatrix h2 = testutil::random_hermitian(2, rng);
      CMatrix d1 = h1 - (h1.trace().real() / 2) * cidentity(2);
      CMatrix d2 = h2 - (h2.trace().real() / 2) * cidentity(2);
      const double lam = 0.5 + 0.4 * std::sin(trial);
      StatePair mix{lam * r1 + (1 - lam) * r2, lam * d1 + (1 - lam) * d2};
      REQUIRE(qfi(mix) <= lam * qfi({r1, d1}) + (1 - lam) * qfi({r2, d2}) + 1e-9);
    }
  }
}

TEST_CASE("purification route to the output QFI", "[fisher]") {
  SECTION("unitary channel gives four times the generator variance") {
    ParamChannel ch;
    ch.d_in = ch.d_out = 2;
    ch.kraus = {cidentity(2)};
    ch.dkraus = {CMatrix(IM * 0.5 * pauli(3))};
    CVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    REQUIRE_THAT(purification_qfi(ch, plus), WithinAbs(1.0, 1e-7));
  }
  SECTION("dephasing at eta = 0.9 on the equator") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.9);
    CVector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    REQUIRE_THAT(purification_qfi(ch, plus), WithinAbs(0.81, 1e-6));
  }
  SECTION("generator eigenstate carries nothing") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.9);
    CVector zero = CVector::Zero(2);
    zero(0) = 1.0;
    REQUIRE_THAT(purification_qfi(ch, zero), WithinAbs(0.0, 1e-7));
  }
  SECTION("matches the direct output QFI on random inputs") {
    std::mt19937_64 rng(41);
    for (noise_kind k : {noise_kind::dephasing, noise_kind::depolarization, noise_kind::loss,
                         noise_kind::spontaneous_emission}) {
      ParamChannel ch = catalog(k, param_kind::phase, 0.0, 0.8);
      for (int trial = 0; trial < 20; ++trial) {
        CVector psi = testutil::random_ket(2, rng);
        const double via_min = purification_qfi(ch, psi);
        const double direct = qfi(channel_output(ch, psi));
        REQUIRE(std::abs(via_min - direct) <= 1e-6 * (1.0 + direct));
      }
    }
  }
}
