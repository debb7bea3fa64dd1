// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "qmetro/channel_io.hpp"

using namespace qmetro;
using Catch::Matchers::WithinAbs;

TEST_CASE("validate accepts catalog channels and flags broken ones", "[channels]") {
  REQUIRE(validate(catalog(noise_kind::dephasing, param_kind::phase, 0.3, 0.9)).empty());
  for (noise_kind k : {noise_kind::depolarization, noise_kind::loss,
                       noise_kind::spontaneous_emission})
    REQUIRE(validate(catalog(k, param_kind::phase, 0.1, 0.7)).empty());

  SECTION("derivative inconsistency") {
    ParamChannel ch;
    ch.d_in = ch.d_out = 2;
    ch.kraus = {cidentity(2)};
    ch.dkraus = {pauli(3)};
    auto bad = validate(ch);
    REQUIRE_FALSE(bad.empty());
    REQUIRE(bad.front().find("derivative") != std::string::npos);
  }
  SECTION("CPTP violation") {
    ParamChannel ch;
    ch.d_in = ch.d_out = 2;
    ch.kraus = {CMatrix(0.5 * cidentity(2))};
    ch.dkraus = {CMatrix::Zero(2, 2)};
    auto bad = validate(ch);
    REQUIRE_FALSE(bad.empty());
    REQUIRE(bad.front().find("CPTP") != std::string::npos);
  }
  SECTION("linear dependence") {
    const double c = 1.0 / std::sqrt(2.0);
    ParamChannel ch;
    ch.d_in = ch.d_out = 2;
    ch.kraus = {CMatrix(c * cidentity(2)), CMatrix(c * cidentity(2))};
    ch.dkraus = {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)};
    auto bad = validate(ch);
    REQUIRE_FALSE(bad.empty());
    REQUIRE(bad.front().find("independent") != std::string::npos);
    REQUIRE(validate(compress(ch)).empty());
  }
}

TEST_CASE("catalog structure", "[channels]") {
  SECTION("dephasing phase channel") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.4, 0.6);
    REQUIRE(ch.rank() == 2);
    const CMatrix u = phase_unitary(noise_kind::dephasing, 0.4);
    REQUIRE(op_norm(CMatrix(ch.kraus[0] - std::sqrt(0.8) * u)) <= 1e-12);
    REQUIRE(op_norm(CMatrix(ch.kraus[1] - std::sqrt(0.2) * CMatrix(u * pauli(3)))) <= 1e-12);
  }
  SECTION("loss is a 2 to 3 dimensional map") {
    ParamChannel ch = catalog(noise_kind::loss, param_kind::phase, 0.0, 0.64);
    REQUIRE(ch.d_out == 3);
    REQUIRE(ch.rank() == 3);
    REQUIRE_THAT(ch.kraus[2](0, 0).real(), WithinAbs(0.8, 1e-12));
    REQUIRE_THAT(ch.kraus[0](2, 1).real(), WithinAbs(0.6, 1e-12));
  }
  SECTION("strength derivatives of dephasing at eta = 0.6") {
    ParamChannel ch = catalog(noise_kind::dephasing, param_kind::strength, 0.0, 0.6);
    REQUIRE(op_norm(CMatrix(ch.dkraus[0] - cidentity(2) / (2.0 * std::sqrt(2.0 * 1.6)))) <= 1e-12);
    REQUIRE(op_norm(CMatrix(ch.dkraus[1] + pauli(3) / (2.0 * std::sqrt(2.0 * 0.4)))) <= 1e-12);
  }
  SECTION("parameter domain") {
    REQUIRE_THROWS_AS(catalog(noise_kind::dephasing, param_kind::phase, 0.0, 1.0), error);
    REQUIRE_THROWS_AS(catalog(noise_kind::dephasing, param_kind::phase, 0.0, -0.1), error);
    REQUIRE_THROWS_AS(catalog(noise_kind::loss, param_kind::strength, 0.0, 0.0), error);
  }
}

TEST_CASE("choi pairs", "[channels]") {
  SECTION("identity channel") {
    ParamChannel ch;
    ch.d_in = ch.d_out = 2;
    ch.kraus = {cidentity(2)};
    ch.dkraus = {CMatrix::Zero(2, 2)};
    ChoiPair cp = choi(ch);
    auto eig = herm_eig(cp.omega);
    REQUIRE_THAT(eig.eigenvalues(3), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(eig.eigenvalues(2), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(op_norm(cp.domega), WithinAbs(0.0, 1e-15));
  }
  SECTION("dephasing spectrum") {
    const double eta = 0.35;
    ChoiPair cp = choi(catalog(noise_kind::dephasing, param_kind::phase, 0.0, eta));
    auto eig = herm_eig(cp.omega);
    REQUIRE_THAT(eig.eigenvalues(3), WithinAbs(1.0 + eta, 1e-12));
    REQUIRE_THAT(eig.eigenvalues(2), WithinAbs(1.0 - eta, 1e-12));
  }
  SECTION("traces for every catalog channel") {
    for (noise_kind k : {noise_kind::dephasing, noise_kind::depolarization, noise_kind::loss,
                         noise_kind::spontaneous_emission}) {
      ChoiPair cp = choi(catalog(k, param_kind::phase, 0.2, 0.8));
      REQUIRE_THAT(cp.omega.trace().real(), WithinAbs(2.0, 1e-10));
      REQUIRE_THAT(std::abs(cp.domega.trace()), WithinAbs(0.0, 1e-10));
      REQUIRE(herm_eig(cp.omega).eigenvalues.minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("rotate_local preserves the channel", "[channels]") {
  std::mt19937_64 rng(17);
  ParamChannel ch = catalog(noise_kind::depolarization, param_kind::phase, 0.0, 0.55);
  SECTION("h = 0 leaves everything unchanged") {
    ParamChannel rot = rotate_local(ch, CMatrix::Zero(4, 4));
    for (std::size_t i = 0; i < ch.kraus.size(); ++i)
      REQUIRE(op_norm(CMatrix(rot.dkraus[i] - ch.dkraus[i])) <= 1e-15);
  }
  SECTION("invariants hold for random generators") {
    for (int trial = 0; trial < 100; ++trial) {
      CMatrix h = testutil::random_hermitian(4, rng);
      ParamChannel rot = rotate_local(ch, h);
      REQUIRE(op_norm(cptp_defect(rot)) <= 1e-10);
      REQUIRE(op_norm(derivative_defect(rot)) <= 1e-10);
      // the map derivative is gauge independent
      ChoiPair a = choi(ch), b = choi(rot);
      REQUIRE(op_norm(CMatrix(a.domega - b.domega)) <= 1e-10);
    }
  }
  SECTION("dephasing witness generator reaches the extended value") {
    const double eta = 0.8;
    ParamChannel deph = catalog(noise_kind::dephasing, param_kind::phase, 0.0, eta);
    CMatrix h = 0.5 * std::sqrt(1.0 - eta * eta) * pauli(1);
    ParamChannel rot = rotate_local(deph, h);
    CMatrix alpha = CMatrix::Zero(2, 2);
    for (const auto& dk : rot.dkraus) alpha += dk.adjoint() * dk;
    REQUIRE_THAT(4.0 * op_norm(alpha), WithinAbs(eta * eta, 1e-12));
  }
}

TEST_CASE("tensor composition", "[channels]") {
  ParamChannel ch = catalog(noise_kind::dephasing, param_kind::phase, 0.0, 0.7);
  ParamChannel two = tensor(ch, ch);
  REQUIRE(two.rank() == 4);
  REQUIRE(two.d_in == 4);
  REQUIRE(validate(two).empty());
  SECTION("choi spectrum matches the kron square") {
    ChoiPair one_cp = choi(ch);
    ChoiPair two_cp = choi(two);
    auto spec_a = herm_eig(two_cp.omega).eigenvalues;
    auto spec_b = herm_eig(CMatrix(kron(one_cp.omega, one_cp.omega))).eigenvalues;
    for (Index i = 0; i < spec_a.size(); ++i)
      REQUIRE_THAT(spec_a(i), WithinAbs(spec_b(i), 1e-9));
  }
  SECTION("parameter mismatch is rejected") {
    ParamChannel other = catalog(noise_kind::dephasing, param_kind::strength, 0.0, 0.7);
    REQUIRE_THROWS_AS(tensor(ch, other), error);
  }
}

TEST_CASE("eta_of_t", "[channels]") {
  REQUIRE_THAT(eta_of_t(noise_kind::dephasing, 1.0, 0.0), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(eta_of_t(noise_kind::depolarization, 1.0, 3.0), WithinAbs(std::exp(-2.0), 1e-14));
  REQUIRE_THAT(eta_of_t(noise_kind::loss, 2.0, 0.5), WithinAbs(std::exp(-1.0), 1e-14));
  REQUIRE_THROWS_AS(eta_of_t(noise_kind::loss, -1.0, 0.5), error);
}

TEST_CASE("noise commutes with the phase rotation", "[channels]") {
  for (noise_kind k : {noise_kind::dephasing, noise_kind::depolarization, noise_kind::loss,
                       noise_kind::spontaneous_emission}) {
    const double phi = 0.37, eta = 0.62;
    ParamChannel at_phi = catalog(k, param_kind::phase, phi, eta);
    ParamChannel at_zero = catalog(k, param_kind::phase, 0.0, eta);
    const CMatrix u_out = phase_unitary(k, phi);
    const CMatrix u_in = phase_unitary(noise_kind::dephasing, phi);  // 2-dim input rotation
    // apply both orderings to a full operator basis
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 2; ++b) {
        CMatrix basis_op = CMatrix::Zero(2, 2);
        basis_op(a, b) = 1.0;
        auto apply = [](const ParamChannel& c, const CMatrix& rho) {
          CMatrix out = CMatrix::Zero(c.d_out, c.d_out);
          for (const auto& kr : c.kraus) out += kr * rho * kr.adjoint();
          return out;
        };
        // noise after rotation ...
        const CMatrix noise_after = apply(at_zero, CMatrix(u_in * basis_op * u_in.adjoint()));
        // ... equals rotation after noise, with the embedded output unitary
        const CMatrix rotation_after =
            u_out * apply(at_zero, basis_op) * u_out.adjoint();
        REQUIRE(op_norm(CMatrix(noise_after - rotation_after)) <= 1e-10);
        // and the catalog at phi realizes exactly that map
        REQUIRE(op_norm(CMatrix(apply(at_phi, basis_op) - rotation_after)) <= 1e-10);
      }
  }
}

TEST_CASE("finite-difference construction matches analytic derivatives", "[channels]") {
  const double eta = 0.45;
  auto sampler = [eta](double phi) {
    return catalog(noise_kind::spontaneous_emission, param_kind::phase, phi, eta).kraus;
  };
  ParamChannel fd = finite_difference_channel(sampler, 0.2);
  ParamChannel exact = catalog(noise_kind::spontaneous_emission, param_kind::phase, 0.2, eta);
  for (std::size_t i = 0; i < fd.kraus.size(); ++i)
    REQUIRE(op_norm(CMatrix(fd.dkraus[i] - exact.dkraus[i])) <= 1e-9);
  REQUIRE(validate(fd).empty());
}

TEST_CASE("channel files round-trip bit-exactly", "[channels]") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "qmetro_test_channel.json";
  ParamChannel ch = catalog(noise_kind::depolarization, param_kind::phase, 0.123456789, 0.7654321);
  save_channel(ch, path.string());
  ParamChannel back = load_channel(path.string());
  REQUIRE(back.d_in == ch.d_in);
  REQUIRE(back.d_out == ch.d_out);
  REQUIRE(back.param == ch.param);
  REQUIRE(back.param_value == ch.param_value);  // bit-exact
  REQUIRE(back.noise_value == ch.noise_value);
  for (std::size_t i = 0; i < ch.kraus.size(); ++i) {
    REQUIRE((back.kraus[i] - ch.kraus[i]).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.dkraus[i] - ch.dkraus[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  fs::remove(path);
}

TEST_CASE("shipped dephasing channel file", "[channels]") {
  ParamChannel ch = load_channel(std::string(QMETRO_DATA_DIR) + "/dephasing_eta09.chan");
  REQUIRE(validate(ch).empty());
  REQUIRE(ch.kind == noise_kind::dephasing);
  REQUIRE_THAT(ch.noise_value, WithinAbs(0.9, 1e-15));
}
