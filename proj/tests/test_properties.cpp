#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "mpsvqe/hamio.hpp"
#include "mpsvqe/mps.hpp"
#include "mpsvqe/vqe.hpp"
#include "mpsvqe/zne.hpp"

using namespace mpsvqe;

// Seeded randomized checks; each case draws its own instance.
class Seeded : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(Seeded, MpsEnergyEqualsDense) {
  std::mt19937_64 rng(GetParam());
  const std::size_t n = 2 + rng() % 7;
  const std::size_t chi = 1 + rng() % 4;
  const auto h = testing_util::random_hamiltonian(n, 5 + rng() % 30, rng());
  const auto m = mps::canonicalize(mps::random_mps(n, chi, rng()), rng() % n);
  const auto psi = mps::dense(m);
  EXPECT_NEAR(mps::energy(m, h), expectation(psi, h), 1e-9);
}

TEST_P(Seeded, CanonicalizePreservesState) {
  std::mt19937_64 rng(GetParam() + 1000);
  const std::size_t n = 2 + rng() % 7;
  const auto m = mps::random_mps(n, 1 + rng() % 5, rng());
  const auto a = mps::dense(m), b = mps::dense(mps::canonicalize(m, rng() % n));
  const cplx ov = a.inner(b);
  const cplx phase = ov / std::abs(ov);
  for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_LE(std::abs(a[i] * phase - b[i]), 1e-10);
}

TEST_P(Seeded, ParameterShiftEqualsFiniteDifference) {
  std::mt19937_64 rng(GetParam() + 2000);
  const std::size_t n = 2 + rng() % 4;
  const auto h = testing_util::random_hamiltonian(n, 10, rng());
  const auto c = build_ansatz(n, 1 + rng() % 2);
  const auto theta = testing_util::random_angles(c.n_params(), rng());
  const Objective obj(c, h, {});
  const auto g = obj.gradient(theta);
  const double d = 1e-5;
  for (std::size_t trial = 0; trial < 6; ++trial) {
    const std::size_t j = rng() % theta.size();
    auto tp = theta, tm = theta;
    tp[j] += d;
    tm[j] -= d;
    EXPECT_NEAR(g[j], (obj.energy(tp) - obj.energy(tm)) / (2 * d), 1e-6);
  }
}

TEST_P(Seeded, EnergyRespectsRayleighBound) {
  std::mt19937_64 rng(GetParam() + 3000);
  const std::size_t n = 2 + rng() % 4;
  const auto h = testing_util::random_hamiltonian(n, 12, rng());
  const auto c = build_ansatz(n, 1);
  const double e0 = hamio::exact_ground_energy(h);
  for (int k = 0; k < 5; ++k)
    EXPECT_GE(energy(c, testing_util::random_angles(c.n_params(), rng()), h, {}), e0 - 1e-10);
}

TEST_P(Seeded, FoldingIsUnitaryEquivalent) {
  std::mt19937_64 rng(GetParam() + 4000);
  const std::size_t n = 2 + rng() % 3;
  const auto c = build_ansatz(n, 1);
  const auto theta = testing_util::random_angles(c.n_params(), rng());
  const Eigen::MatrixXcd u = testing_util::circuit_unitary(c, theta);
  const FoldMode mode = rng() % 2 ? FoldMode::PerGate : FoldMode::Global;
  for (double s : {1.0, 3.0, 5.0})
    EXPECT_LE((testing_util::circuit_unitary(fold(c, s, mode).circuit, theta) - u).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_P(Seeded, RandomChannelsAreCptp) {
  std::mt19937_64 rng(GetParam() + 5000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EXPECT_LE(depolarizing_channel(u(rng), 1).completeness_error(), 1e-10);
  EXPECT_LE(depolarizing_channel(u(rng), 2).completeness_error(), 1e-10);
  EXPECT_LE(amplitude_damping_channel(u(rng)).completeness_error(), 1e-10);
  EXPECT_LE(phase_flip_channel(u(rng)).completeness_error(), 1e-10);
  EXPECT_LE(bitflip_channel(u(rng)).completeness_error(), 1e-10);
  const double t1 = 1 + 200 * u(rng);
  const double t2 = t1 * (0.1 + 1.9 * u(rng));
  EXPECT_LE(thermal_relaxation_channel(t1, t2, 1000 * u(rng)).completeness_error(), 1e-10);
}

TEST_P(Seeded, GroupingIsValidPartition) {
  std::mt19937_64 rng(GetParam() + 6000);
  const std::size_t n = 1 + rng() % 8;
  const auto h = testing_util::random_hamiltonian(n, 1 + rng() % 80, rng());
  std::vector<int> seen(h.size(), 0);
  for (const auto& g : group_terms(h)) {
    EXPECT_TRUE(is_valid_group(h, g));
    for (std::size_t a : g.member_indices) {
      ++seen[a];
      for (std::size_t b : g.member_indices) EXPECT_TRUE(qubitwise_commutes(h.terms()[a].string, h.terms()[b].string));
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST_P(Seeded, LinearExtrapolationShiftEquivariant) {
  std::mt19937_64 rng(GetParam() + 7000);
  std::normal_distribution<double> g;
  std::vector<zne::ScalePoint> d;
  for (double l : {1.0, 3.0, 5.0}) d.push_back({l, {g(rng), g(rng)}});
  const double shift = g(rng);
  auto s = d;
  for (auto& p : s)
    for (double& e : p.estimates) e += shift;
  EXPECT_NEAR(zne::extrapolate(zne::fit(zne::ModelKind::Linear, s)),
              zne::extrapolate(zne::fit(zne::ModelKind::Linear, d)) + shift, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Cases, Seeded, ::testing::Range<std::uint64_t>(0, 12));

TEST(SampledEstimators, GroupedMatchesTermByTerm) {
  const auto h = testing_util::random_hamiltonian(3, 8, 21);
  const auto c = build_ansatz(3, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 22);
  const auto psi = simulate(c, theta);
  const std::size_t shots = 100000;
  double grouped = 0.0, single = 0.0, var_g = 0.0, var_s = 0.0;
  const auto groups = group_terms(h);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto v = sample_group(psi, h, groups[k], shots, 0.0, derive_seed(1, k));
    double sum = 0.0;
    for (std::size_t m = 0; m < v.size(); ++m) {
      grouped += h.terms()[groups[k].member_indices[m]].coeff * v[m];
      sum += std::abs(h.terms()[groups[k].member_indices[m]].coeff);
    }
    var_g += sum * sum / double(shots);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    MeasurementGroup g;
    g.member_indices = {i};
    for (std::size_t q = 0; q < 3; ++q) {
      const Pauli p = h.terms()[i].string[q];
      g.basis_rotation.push_back(p == Pauli::X ? Basis::X : p == Pauli::Y ? Basis::Y : Basis::Z);
    }
    single += h.terms()[i].coeff * sample_group(psi, h, g, shots, 0.0, derive_seed(2, i))[0];
    var_s += h.terms()[i].coeff * h.terms()[i].coeff / double(shots);
  }
  EXPECT_NEAR(grouped, single, 5 * std::sqrt(var_g + var_s));
}
