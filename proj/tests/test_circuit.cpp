#include <gtest/gtest.h>

#include <numbers>

#include "helpers.hpp"
#include "mpsvqe/circuit.hpp"
#include "mpsvqe/errors.hpp"

using namespace mpsvqe;

TEST(Ansatz, GateMetricsForEightQubits) {
  EXPECT_EQ(metrics(build_ansatz(8, 1)), (GateMetrics{8, 91, 84, 7}));
  EXPECT_EQ(metrics(build_ansatz(8, 2)), (GateMetrics{8, 182, 168, 14}));
}

TEST(Ansatz, ParametersAllUsedOnce) {
  const auto c = build_ansatz(5, 2);
  EXPECT_TRUE(c.all_params_used());
  EXPECT_EQ(c.n_params(), 2 * 4 * kParamsPerBlock);
}

TEST(Ansatz, StaircaseOrder) {
  const auto c = build_ansatz(3, 1);
  const auto dump = c.dump();
  EXPECT_EQ(dump.substr(0, dump.find('\n')), "RZ 1 p0");
  EXPECT_NE(dump.find("CNOT 1 2"), std::string::npos);
  EXPECT_LT(dump.find("CNOT 1 2"), dump.find("CNOT 0 1"));
}

TEST(Ansatz, ZeroAnglesLeaveOnlyTheCnotStaircase) {
  // With every rotation at zero the ansatz reduces to its CNOTs.
  const auto c = build_ansatz(4, 1);
  const std::vector<double> zero(c.n_params(), 0.0);
  auto psi = StateVector::basis(4, 0b1100);
  run(c, zero, psi);
  // CNOT(2,3) idles, CNOT(1,2) flips 2, CNOT(0,1) clears 1.
  EXPECT_NEAR(std::abs(psi[0b1010]), 1.0, 1e-12);
  auto zero_state = StateVector(4);
  run(c, zero, zero_state);
  EXPECT_NEAR(std::abs(zero_state[0]), 1.0, 1e-12);
}

TEST(Circuit, ValidationErrors) {
  EXPECT_THROW(ParamCircuit(2, {Gate::cnot(0, 0)}, 0), ValidationError);
  EXPECT_THROW(ParamCircuit(2, {Gate::rz(2, 0)}, 1), ValidationError);
  EXPECT_THROW(ParamCircuit(2, {Gate::rz(0, 3)}, 1), ValidationError);
  const auto c = build_ansatz(3, 1);
  std::vector<double> short_theta(5);
  StateVector psi(3);
  EXPECT_THROW(run(c, short_theta, psi), ValidationError);
  EXPECT_THROW(prepend_reference_state(c, "10"), ValidationError);
}

TEST(Circuit, KernelsMatchGenericMatrices) {
  const auto c = build_ansatz(4, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 5);
  auto fast = testing_util::random_state(4, 8);
  auto slow = fast;
  run(c, theta, fast);
  for (const Gate& g : c.gates()) apply_gate(slow, g.matrix(theta), g.qubits());
  EXPECT_LT((testing_util::to_eigen(fast) - testing_util::to_eigen(slow)).norm(), 1e-12);
}

TEST(Folding, OddScalesPreserveUnitary) {
  const auto c = build_ansatz(4, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 1);
  const Eigen::MatrixXcd u = testing_util::circuit_unitary(c, theta);
  for (FoldMode mode : {FoldMode::PerGate, FoldMode::Global})
    for (double s : {1.0, 3.0, 5.0}) {
      const auto f = fold(c, s, mode);
      EXPECT_DOUBLE_EQ(f.achieved_scale, s);
      EXPECT_EQ(f.circuit.size(), static_cast<std::size_t>(s) * c.size());
      EXPECT_LE((testing_util::circuit_unitary(f.circuit, theta) - u).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Folding, FractionalScalesReportAchievedValue) {
  const auto c = build_ansatz(3, 1);  // 42 gates
  const auto f = fold(c, 2.0, FoldMode::PerGate);
  EXPECT_NEAR(f.achieved_scale, 2.0, 2.0 / c.size());
  EXPECT_EQ(f.circuit.size(), static_cast<std::size_t>(std::llround(f.achieved_scale * c.size())));
  const auto theta = testing_util::random_angles(c.n_params(), 2);
  EXPECT_LE((testing_util::circuit_unitary(f.circuit, theta) - testing_util::circuit_unitary(c, theta))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
  EXPECT_THROW(fold(c, 0.5, FoldMode::Global), ValidationError);
}

TEST(Folding, AdjointReferencesDump) {
  ParamCircuit c(1, {Gate::ry(0, 0)}, 1);
  EXPECT_EQ(fold(c, 3, FoldMode::PerGate).circuit.dump(), "RY 0 p0\nRY 0 -p0\nRY 0 p0\n");
}

TEST(NoisyExecutor, NoiselessMatchesStatevector) {
  const auto c = prepend_reference_state(build_ansatz(3, 1), "110");
  const auto theta = testing_util::random_angles(c.n_params(), 4);
  const NoisyExecutor ex(NoiseModel::none());
  const auto rho = ex.simulate(c, theta);
  const Eigen::VectorXcd v = testing_util::to_eigen(simulate(c, theta));
  EXPECT_LT((rho.matrix() - v * v.adjoint()).norm(), 1e-10);
}

TEST(NoisyExecutor, NoiseReducesPurityAndKeepsTrace) {
  const auto c = build_ansatz(3, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 4);
  const auto rho = NoisyExecutor(NoiseModel::paper()).simulate(c, theta);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
  EXPECT_LT(rho.purity(), 0.999);
  const Eigen::MatrixXcd m = rho.matrix();
  EXPECT_LT((m - m.adjoint()).norm(), 1e-12);
}
