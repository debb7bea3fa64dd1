// SPDX-License-Identifier: Apache-2.0
#include "helpers.hpp"
#include "qmetro/verify.hpp"

using namespace qmetro;
using Catch::Matchers::WithinAbs;

namespace {
ParamChannel deph(double eta) { return catalog(noise_kind::dephasing, param_kind::phase, 0.0, eta); }
}  // namespace

TEST_CASE("channel_qfi on the catalog", "[bounds]") {
  REQUIRE_THAT(channel_qfi(deph(0.8)).value, WithinAbs(0.64, 1e-7));
  REQUIRE_THAT(channel_qfi(catalog(noise_kind::loss, param_kind::phase, 0.0, 0.9)).value,
               WithinAbs(0.9, 1e-7));
  SECTION("unitary limit") {
    REQUIRE_THAT(channel_qfi(deph(1.0 - 1e-9)).value, WithinAbs(1.0, 1e-6));
  }
  SECTION("witness input reproduces the value") {
    BoundResult r = channel_qfi(deph(0.8));
    REQUIRE(r.witness_input.has_value());
    REQUIRE_THAT(qfi(channel_output(deph(0.8), *r.witness_input)), WithinAbs(r.value, 1e-9));
  }
  SECTION("eta = 0 carries no phase information") {
    BoundResult r = channel_qfi(deph(0.0));
    REQUIRE(r.value == 0.0);
    REQUIRE(r.status == BoundStatus::exact);
  }
}

TEST_CASE("extended_qfi on the catalog", "[bounds]") {
  REQUIRE_THAT(extended_qfi(catalog(noise_kind::depolarization, param_kind::phase, 0.0, 0.9)).value,
               WithinAbs(2.0 * 0.81 / 1.9, 1e-6));
  const double eta = 0.9;
  const double want = 4.0 * eta / std::pow(1.0 + std::sqrt(eta), 2);
  REQUIRE_THAT(
      extended_qfi(catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, eta)).value,
      WithinAbs(want, 1e-6));
  REQUIRE_THAT(extended_qfi(deph(0.8)).value, WithinAbs(0.64, 1e-6));
}

TEST_CASE("cs_bound", "[bounds]") {
  SECTION("dephasing closed form") {
    BoundResult r = cs_bound(deph(0.9));
    REQUIRE(r.status == BoundStatus::upper_bound);
    REQUIRE(testutil::rel_err(r.value, 0.81 / 0.19) <= 1e-6);
    REQUIRE(r.witness_eps.has_value());
    const auto [ep, em] = *r.witness_eps;
    REQUIRE_THAT(1.0 / (ep * em), WithinAbs(r.value, 1e-9));
  }
  SECTION("depolarization closed form") {
    BoundResult r = cs_bound(catalog(noise_kind::depolarization, param_kind::phase, 0.0, 0.5));
    REQUIRE(testutil::rel_err(r.value, 0.8) <= 1e-6);
  }
  SECTION("boundary channels admit no mixing range") {
    REQUIRE(cs_bound(catalog(noise_kind::loss, param_kind::phase, 0.0, 0.7)).status ==
            BoundStatus::not_applicable);
    REQUIRE(cs_bound(catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.7))
                .status == BoundStatus::not_applicable);
  }
}

TEST_CASE("rld_bound", "[bounds]") {
  REQUIRE(testutil::rel_err(rld_bound(deph(0.9)).value, 0.81 / 0.19) <= 1e-6);
  SECTION("depolarization closed form") {
    const double eta = 0.5;
    const double want = 2.0 * eta * eta * (1.0 + eta) / ((1.0 - eta) * (1.0 + 3.0 * eta));
    REQUIRE(testutil::rel_err(
                rld_bound(catalog(noise_kind::depolarization, param_kind::phase, 0.0, eta)).value,
                want) <= 1e-6);
  }
  SECTION("not applicable on boundary channels") {
    REQUIRE(rld_bound(catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.5))
                .status == BoundStatus::not_applicable);
    REQUIRE(rld_bound(catalog(noise_kind::loss, param_kind::phase, 0.0, 0.5)).status ==
            BoundStatus::not_applicable);
  }
}

TEST_CASE("ce_asymptotic", "[bounds]") {
  REQUIRE(testutil::rel_err(ce_asymptotic(deph(0.9)).value, 0.81 / 0.19) <= 1e-6);
  REQUIRE(testutil::rel_err(
              ce_asymptotic(catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.9))
                  .value,
              36.0) <= 1e-6);
  REQUIRE(testutil::rel_err(
              ce_asymptotic(catalog(noise_kind::loss, param_kind::phase, 0.0, 0.5)).value, 1.0) <=
          1e-6);
  SECTION("witness honors the constraint") {
    BoundResult r = ce_asymptotic(deph(0.9));
    REQUIRE(r.witness_h.has_value());
    REQUIRE(op_norm(ce_beta(deph(0.9), *r.witness_h)) <= 1e-7);
  }
  SECTION("a unitary channel admits no vanishing beta") {
    ParamChannel ch;
    ch.d_in = ch.d_out = 2;
    ch.kraus = {cidentity(2)};
    ch.dkraus = {CMatrix(IM * 0.5 * pauli(3))};
    REQUIRE_THROWS_AS(ce_asymptotic(ch), error);
  }
}

TEST_CASE("qs_bound", "[bounds]") {
  SECTION("depolarization coincides with the extension bound") {
    BoundResult r = qs_bound(catalog(noise_kind::depolarization, param_kind::phase, 0.0, 0.5));
    REQUIRE(r.applicable());
    REQUIRE(testutil::rel_err(r.value, 0.5) <= 1e-6);
  }
  SECTION("loss closed form") {
    BoundResult r = qs_bound(catalog(noise_kind::loss, param_kind::phase, 0.0, 0.9));
    REQUIRE(r.applicable());
    REQUIRE(testutil::rel_err(r.value, 9.0) <= 1e-6);
  }
  SECTION("spontaneous emission is not simulable") {
    BoundResult r = qs_bound(catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.5));
    REQUIRE(r.status == BoundStatus::infeasible);
  }
}

TEST_CASE("ce_finite", "[bounds]") {
  SECTION("reduces to the extended value at N = 1") {
    REQUIRE_THAT(ce_finite(deph(0.9), 1).value, WithinAbs(0.81, 1e-6));
  }
  SECTION("finite-N law at N = 10") {
    const double fas = 0.81 / 0.19;
    const double want = 10.0 * fas / (10.0 + fas);
    REQUIRE(testutil::rel_err(ce_finite(deph(0.9), 10).value, want) <= 1e-6);
    REQUIRE(testutil::rel_err(ce_finite_closed(noise_kind::dephasing, 0.9, 10), want) <= 1e-12);
  }
  SECTION("monotone in N and convergent to the asymptote") {
    ParamChannel ch = catalog(noise_kind::loss, param_kind::phase, 0.0, 0.8);
    double prev = 0.0;
    for (long n : {1L, 2L, 5L, 20L, 200L, 100000L}) {
      const double v = ce_finite(ch, n).value;
      REQUIRE(v >= prev - 1e-9);
      prev = v;
    }
    REQUIRE(testutil::rel_err(prev, ce_asymptotic(ch).value) <= 1e-4);
  }
  SECTION("invariant under representation rotations") {
    std::mt19937_64 rng(43);
    ParamChannel ch = catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, 0.7);
    const double base = ce_finite(ch, 6).value;
    for (int trial = 0; trial < 5; ++trial) {
      CMatrix h = testutil::random_hermitian(2, rng);
      REQUIRE(testutil::rel_err(ce_finite(rotate_local(ch, h), 6).value, base) <= 1e-6);
    }
  }
  SECTION("closed form domain") {
    REQUIRE_THROWS_AS(ce_finite_closed(noise_kind::spontaneous_emission, 0.9, 1), error);
    const double fas = asymptotic_ce_closed(noise_kind::loss, 0.5);
    REQUIRE_THAT(ce_finite_closed(noise_kind::loss, 0.5, 1), WithinAbs(fas / (1.0 + fas), 1e-12));
    REQUIRE(testutil::rel_err(ce_finite_closed(noise_kind::loss, 0.5, 100000000),
                              asymptotic_ce_closed(noise_kind::loss, 0.5)) <= 1e-6);
  }
}

TEST_CASE("extension never hurts", "[bounds]") {
  std::mt19937_64 rng(47);
  for (noise_kind k : verify::all_kinds()) {
    ParamChannel ch = catalog(k, param_kind::phase, 0.0, 0.75);
    REQUIRE(extended_qfi(ch).value >= channel_qfi(ch).value - 1e-6);
  }
  for (int trial = 0; trial < 20; ++trial) {
    ParamChannel ch = verify::random_channel(2, 2, 1 + trial % 4, rng);
    REQUIRE(extended_qfi(ch).value >= channel_qfi(ch).value - 1e-6);
  }
}

TEST_CASE("enhancement factors", "[bounds]") {
  SECTION("dephasing attains its factor") {
    auto [bare, ext] = enhancement(deph(0.9));
    const double want = std::sqrt(1.0 / 0.19);
    REQUIRE(testutil::rel_err(bare.value, want) <= 1e-6);
    REQUIRE(testutil::rel_err(ext.value, want) <= 1e-6);
    REQUIRE(bare.status == BoundStatus::exact);
    REQUIRE(ext.status == BoundStatus::exact);
  }
  SECTION("spontaneous emission splits the factors") {
    const double eta = 0.5;
    auto [bare, ext] =
        enhancement(catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.0, eta));
    REQUIRE(testutil::rel_err(bare.value, std::sqrt(4.0 / (1.0 - eta))) <= 1e-6);
    REQUIRE(testutil::rel_err(ext.value, std::sqrt((1.0 + std::sqrt(eta)) /
                                                   (1.0 - std::sqrt(eta)))) <= 1e-6);
    REQUIRE(bare.status == BoundStatus::upper_bound);
    REQUIRE(ext.status == BoundStatus::exact);
  }
}

TEST_CASE("quoted generators reproduce the extended values", "[bounds]") {
  for (noise_kind k : verify::all_kinds()) {
    for (double eta : {0.3, 0.8}) {
      ParamChannel ch = verify::noise_after_rotation_channel(k, eta);
      const double got = 4.0 * op_norm(ce_alpha(ch, verify::quoted_optimal_h(k, eta)));
      REQUIRE(testutil::rel_err(got, verify::closed::fext(k, eta)) <= 1e-8);
    }
  }
}

TEST_CASE("strength-parameterized bounds", "[bounds]") {
  SECTION("loss strength closed forms") {
    ParamChannel ch = catalog(noise_kind::loss, param_kind::strength, 0.0, 0.5);
    REQUIRE(testutil::rel_err(channel_qfi(ch).value, 4.0) <= 1e-6);
    REQUIRE(testutil::rel_err(ce_asymptotic(ch).value, 4.0) <= 1e-6);
    REQUIRE(testutil::rel_err(cs_bound(ch).value, 4.0) <= 1e-6);
  }
  SECTION("depolarization strength gains from extension") {
    const double eta = 0.5;
    ParamChannel ch = catalog(noise_kind::depolarization, param_kind::strength, 0.0, eta);
    REQUIRE(testutil::rel_err(channel_qfi(ch).value, 1.0 / (1.0 - eta * eta)) <= 1e-6);
    REQUIRE(testutil::rel_err(extended_qfi(ch).value,
                              3.0 / ((1.0 - eta) * (1.0 + 3.0 * eta))) <= 1e-6);
  }
}
