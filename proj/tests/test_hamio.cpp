#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "mpsvqe/errors.hpp"
#include "mpsvqe/hamio.hpp"

using namespace mpsvqe;

namespace {
const std::string kH4 = std::string(MPSVQE_DATA_DIR) + "/h4_sto3g.json";

std::string doc(const std::string& terms, const std::string& extra = "") {
  return R"({"format_version": 1, "n_qubits": 2, "n_electrons": 1, )" + extra + R"("terms": [)" + terms + "]}";
}
}  // namespace

TEST(Hamio, LoadsH4Fixture) {
  const auto h = hamio::load(kH4);
  EXPECT_EQ(h.n_qubits(), 8u);
  ASSERT_TRUE(h.metadata());
  EXPECT_EQ(h.metadata()->n_electrons, 4);
  EXPECT_EQ(h.metadata()->basis, "sto-3g");
  EXPECT_EQ(h.metadata()->geometry.size(), 4u);
  EXPECT_GE(*h.metadata()->hf_energy, *h.metadata()->fci_energy);
}

TEST(Hamio, FixtureExactEnergyAndReference) {
  const auto h = hamio::load(kH4);
  EXPECT_NEAR(hamio::exact_ground_energy(h), -2.1664, 5e-4);
  EXPECT_NEAR(hamio::exact_ground_energy(h), *h.metadata()->fci_energy, 1e-8);
  EXPECT_EQ(hamio::hartree_fock_bits(h), "11110000");
  EXPECT_NEAR(expectation(StateVector::basis(8, 0b11110000), h), *h.metadata()->hf_energy, 1e-8);
}

TEST(Hamio, CanonicalFixtureIsByteStable) {
  std::ifstream in(kH4);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(hamio::serialize(hamio::load(kH4)), buf.str());
}

TEST(Hamio, RoundTripPreservesCoefficientsExactly) {
  const auto h = testing_util::random_hamiltonian(4, 20, 3);
  const auto back = hamio::parse(hamio::serialize(h));
  ASSERT_EQ(back.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(back.terms()[i].string, h.terms()[i].string);
    EXPECT_EQ(back.terms()[i].coeff, h.terms()[i].coeff);
  }
  EXPECT_EQ(hamio::serialize(back), hamio::serialize(h));
}

TEST(Hamio, DuplicatesMergedWithWarning) {
  std::ostringstream warn;
  const auto h = hamio::parse(doc(R"({"pauli": "ZI", "coeff": 1.0}, {"pauli": "ZI", "coeff": 0.25})"), &warn);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.terms()[0].coeff, 1.25);
  EXPECT_NE(warn.str().find("duplicate"), std::string::npos);
}

TEST(Hamio, ErrorsNameTheProblem) {
  const auto message = [](const std::string& text) {
    try {
      hamio::parse(text);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(doc(R"({"pauli": "ZQ", "coeff": 1.0})")).find("terms[0].pauli"), std::string::npos);
  EXPECT_NE(message(doc(R"({"pauli": "ZQ", "coeff": 1.0})")).find("position 1"), std::string::npos);
  EXPECT_NE(message(doc(R"({"pauli": "ZZZ", "coeff": 1.0})")).find("length"), std::string::npos);
  EXPECT_NE(message(doc(R"({"pauli": "ZZ"})")).find("coeff"), std::string::npos);
  EXPECT_NE(message(R"({"format_version": 2, "n_qubits": 1, "terms": []})").find("format_version"),
            std::string::npos);
  EXPECT_NE(message("{\n  \"format_version\": 1,\n  \"n_qubits\": \n}").find("line 4"), std::string::npos);
  EXPECT_NE(message(doc("", R"("ordering": "weird", )")).find("ordering"), std::string::npos);
}

TEST(Hamio, ExactGroundEnergySmallCases) {
  EXPECT_NEAR(hamio::exact_ground_energy(Hamiltonian(1, {{1.0, PauliString::parse("Z")}})), -1.0, 1e-12);
  // Z0Z1 + 0.5 X0: blocks by Z1 give eigenvalues +-sqrt(1 + 0.25).
  Hamiltonian h(2, {{1.0, PauliString::parse("ZZ")}, {0.5, PauliString::parse("XI")}});
  EXPECT_NEAR(hamio::exact_ground_energy(h), -std::sqrt(1.25), 1e-12);
  const Eigen::MatrixXcd dense = h.dense();
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dense).eigenvalues();
  EXPECT_NEAR(hamio::exact_ground_energy(h), ev(0), 1e-12);
}

TEST(Hamio, ExactEnergyInvariantUnderTermOrder) {
  const auto h = testing_util::random_hamiltonian(5, 30, 8);
  std::vector<PauliTerm> reversed(h.terms().rbegin(), h.terms().rend());
  EXPECT_NEAR(hamio::exact_ground_energy(h), hamio::exact_ground_energy(Hamiltonian(5, reversed)), 1e-10);
}

TEST(Hamio, SizeGuard) {
  EXPECT_THROW(hamio::exact_ground_energy(Hamiltonian(13, {{1.0, PauliString(13)}})), SizeGuardError);
}

TEST(Hamio, HartreeFockBits) {
  EXPECT_EQ(hamio::hartree_fock_bits(hamio::parse(doc("", R"("ordering": "interleaved", )"))), "10");
  auto zero = hamio::parse(R"({"format_version": 1, "n_qubits": 3, "n_electrons": 0, "terms": []})");
  EXPECT_EQ(hamio::hartree_fock_bits(zero), "000");
  auto blocked = hamio::parse(
      R"({"format_version": 1, "n_qubits": 8, "n_electrons": 4, "ordering": "blocked-alpha-beta", "terms": []})");
  EXPECT_EQ(hamio::hartree_fock_bits(blocked), "11001100");
  auto missing = hamio::parse(R"({"format_version": 1, "n_qubits": 2, "terms": []})");
  EXPECT_THROW(hamio::hartree_fock_bits(missing), ValidationError);
}
