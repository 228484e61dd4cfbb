#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mpsvqe/circuit.hpp"
#include "mpsvqe/pauli.hpp"
#include "mpsvqe/sim.hpp"

namespace mpsvqe {

enum class EstimatorMode : std::uint8_t { Exact, Sampled };

/// How energies are measured. Exact mode returns tr(rho H) (or <psi|H|psi>
/// without noise); readout flips only enter through sampling.
struct EnergyEstimator {
  EstimatorMode mode = EstimatorMode::Exact;
  std::size_t shots = 10000;  // per measurement group
  std::optional<NoiseModel> noise;

  void validate() const;
};

/// Compiled objective for one (circuit, Hamiltonian, estimator) triple.
class Objective {
 public:
  Objective(ParamCircuit circuit, const Hamiltonian& h, EnergyEstimator est);

  const ParamCircuit& circuit() const { return circuit_; }
  const Hamiltonian& hamiltonian() const { return h_; }
  const EnergyEstimator& estimator() const { return est_; }
  const std::vector<MeasurementGroup>& groups() const { return groups_; }

  double energy(std::span<const double> theta, std::uint64_t seed = 0) const;
  /// Parameter-shift gradient: every rotation occurrence contributes
  /// scale * [E(a + pi/2) - E(a - pi/2)] / 2 to its parameter.
  std::vector<double> gradient(std::span<const double> theta, std::uint64_t seed = 0) const;
  /// Energy and gradient together; the noiseless exact path shares prefix
  /// states between the two.
  std::pair<double, std::vector<double>> energy_and_gradient(std::span<const double> theta,
                                                             std::uint64_t seed = 0) const;

 private:
  // Energy with an extra angle added to gate `shifted` (npos: none).
  double shifted_energy(std::span<const double> theta, std::size_t shifted, double offset,
                        std::uint64_t seed) const;
  double measure(const StateVector& psi, std::uint64_t seed) const;
  double measure(const DensityMatrix& rho, std::uint64_t seed) const;
  void check(std::span<const double> theta) const;

  ParamCircuit circuit_;
  Hamiltonian h_;
  EnergyEstimator est_;
  PauliSumKernel kernel_;
  std::vector<MeasurementGroup> groups_;
  std::optional<NoisyExecutor> executor_;
};

double energy(const ParamCircuit& c, std::span<const double> theta, const Hamiltonian& h,
              const EnergyEstimator& est, std::uint64_t seed = 0);
std::vector<double> gradient(const ParamCircuit& c, std::span<const double> theta, const Hamiltonian& h,
                             const EnergyEstimator& est, std::uint64_t seed = 0);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_iters = 2000;
  double tol = 1e-6;  // Hartree, over a 10-iteration window
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRecord {
  std::size_t iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double wall_ms = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  void write_csv(std::ostream& out) const;  // iter,energy_hartree,grad_norm,wall_ms
};

struct TrainResult {
  std::vector<double> theta;  // best seen
  double best_energy = 0.0;
  TrainTrace trace;
};

/// Plain gradient descent theta <- theta - lr * grad. Stops after max_iters
/// or once |E_i - E_{i-10}| < tol; returns the lowest-energy parameters seen.
TrainResult train(const Objective& obj, std::span<const double> theta_init, const TrainConfig& cfg);
TrainResult train(const ParamCircuit& c, std::span<const double> theta_init, const Hamiltonian& h,
                  const EnergyEstimator& est, const TrainConfig& cfg);

}  // namespace mpsvqe
