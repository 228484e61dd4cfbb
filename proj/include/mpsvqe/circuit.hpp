#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpsvqe/sim.hpp"

namespace mpsvqe {

enum class GateKind : std::uint8_t { RZ, RY, X, CNOT };

std::string_view to_string(GateKind k);

/// Reference into the shared parameter vector. Folded circuits use scale -1
/// for the adjoint copies so that they keep pointing at the base parameter.
struct ParamRef {
  std::size_t index = 0;
  double scale = 1.0;

  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

struct Gate {
  GateKind kind = GateKind::X;
  std::array<std::size_t, 2> targets{};  // CNOT: control, target
  std::optional<ParamRef> param;

  static Gate rz(std::size_t q, std::size_t p) { return {GateKind::RZ, {q, 0}, ParamRef{p}}; }
  static Gate ry(std::size_t q, std::size_t p) { return {GateKind::RY, {q, 0}, ParamRef{p}}; }
  static Gate x(std::size_t q) { return {GateKind::X, {q, 0}, std::nullopt}; }
  static Gate cnot(std::size_t c, std::size_t t) { return {GateKind::CNOT, {c, t}, std::nullopt}; }

  std::size_t arity() const { return kind == GateKind::CNOT ? 2 : 1; }
  bool is_rotation() const { return kind == GateKind::RZ || kind == GateKind::RY; }
  std::span<const std::size_t> qubits() const { return {targets.data(), arity()}; }

  double angle(std::span<const double> theta) const {
    return param ? param->scale * theta[param->index] : 0.0;
  }
  /// Unitary of this gate at the given parameters, plus an extra angle added
  /// to rotations (used for shift rules).
  Eigen::MatrixXcd matrix(std::span<const double> theta, double angle_offset = 0.0) const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

class ParamCircuit {
 public:
  ParamCircuit() = default;
  /// Validates targets, parameter presence per kind, and param_index range.
  ParamCircuit(std::size_t n_qubits, std::vector<Gate> gates, std::size_t n_params);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t n_params() const { return n_params_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// True when every parameter index is referenced by some gate.
  bool all_params_used() const;

  /// One gate per line: `KIND target(s) [param]`, where the parameter is
  /// written `p<index>` or `-p<index>` for adjoint references.
  std::string dump() const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Gate> gates_;
  std::size_t n_params_ = 0;
};

struct GateMetrics {
  std::size_t n_qubits = 0;
  std::size_t total_gates = 0;
  std::size_t parameter_gates = 0;
  std::size_t two_qubit_gates = 0;

  friend bool operator==(const GateMetrics&, const GateMetrics&) = default;
};

GateMetrics metrics(const ParamCircuit& c);

/// Rotation parameters per two-qubit block: (RZ RY RZ) on each qubit, CNOT,
/// then (RZ RY RZ) on each qubit again.
inline constexpr std::size_t kParamsPerBlock = 12;

/// Layered staircase of single-CNOT blocks. Within a layer the blocks act on
/// pairs (n-2, n-1), (n-3, n-2), ..., (0, 1) in that order; the CNOT control is
/// the lower qubit. Parameters are numbered in gate order.
ParamCircuit build_ansatz(std::size_t n_qubits, std::size_t layers);

/// Inserts X on every qubit whose bit is '1' ahead of the circuit.
ParamCircuit prepend_reference_state(const ParamCircuit& c, std::string_view bits);

Gate adjoint_of(const Gate& g);

enum class FoldMode : std::uint8_t { Global, PerGate };

struct FoldedCircuit {
  ParamCircuit circuit;
  double achieved_scale = 1.0;
};

/// Unitary folding. Odd integer scales 2k+1 map G -> G (G^dag G)^k per gate or
/// C -> C (C^dag C)^k globally. Other scales additionally fold the closest
/// number of trailing gates once more; the scale actually reached is returned.
FoldedCircuit fold(const ParamCircuit& c, double scale, FoldMode mode);

/// Noiseless execution on a statevector, starting from `psi`.
void run(const ParamCircuit& c, std::span<const double> theta, StateVector& psi);
StateVector simulate(const ParamCircuit& c, std::span<const double> theta);

/// Gate-level noise attached as precomputed superoperators.
class NoisyExecutor {
 public:
  explicit NoisyExecutor(const NoiseModel& noise);

  const NoiseModel& noise() const { return noise_; }

  void apply(const Gate& g, std::span<const double> theta, DensityMatrix& rho,
             double angle_offset = 0.0) const;
  void run(const ParamCircuit& c, std::span<const double> theta, DensityMatrix& rho) const;
  DensityMatrix simulate(const ParamCircuit& c, std::span<const double> theta) const;

 private:
  NoiseModel noise_;
  bool noiseless_;
  Eigen::MatrixXcd one_qubit_superop_;
  Eigen::MatrixXcd two_qubit_superop_;
};

void apply(const Gate& g, std::span<const double> theta, StateVector& psi,
           double angle_offset = 0.0);

}  // namespace mpsvqe
