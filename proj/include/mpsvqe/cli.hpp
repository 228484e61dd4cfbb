#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpsvqe/mps.hpp"
#include "mpsvqe/vqe.hpp"
#include "mpsvqe/zne.hpp"

namespace mpsvqe::cli {

struct PretrainSettings {
  bool enable = true;
  std::size_t max_bond = 2;
  double perturbation = 0.05;  // amplitude of the noise added to the HF product state
  mps::SweepConfig sweep;
  std::size_t extract_restarts = 200;
  double target_fidelity = 0.999;
};

struct TrainSettings {
  TrainConfig config;
  EstimatorMode estimator = EstimatorMode::Exact;
  std::size_t shots = 10000;
  bool noisy = false;        // train under the noise model
  double init_scale = 0.1;   // std-dev of random initial angles without pre-training
};

struct RunConfig {
  std::filesystem::path hamiltonian = "data/h4_sto3g.json";
  std::size_t layers = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::string run_id;
  PretrainSettings pretrain;
  TrainSettings train;
  bool noise_enabled = true;
  NoiseModel noise = NoiseModel::paper();
  zne::ZneConfig zne;
};

/// Fills a RunConfig from JSON; missing keys keep their defaults, unknown
/// keys are rejected.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);
NoiseModel parse_noise(const nlohmann::json& j);

struct InitResult {
  std::vector<double> theta;
  std::vector<double> pretrain_trace;  // empty without pre-training
  std::vector<double> block_fidelities;
};

/// Initial angles for build_ansatz(n, layers) behind the HF reference: MPS
/// pre-training plus extraction, or small Gaussian angles.
InitResult initial_parameters(const RunConfig& cfg, const Hamiltonian& h, std::uint64_t seed, bool pretrain);

struct TrainOutcome {
  InitResult init;
  double initial_energy = 0.0;
  TrainResult result;
};

/// HF-referenced ansatz used by every command.
ParamCircuit pipeline_circuit(const RunConfig& cfg, const Hamiltonian& h);

TrainOutcome run_training(const RunConfig& cfg, const Hamiltonian& h, std::uint64_t seed, bool pretrain);

/// Runs `count` seeds derived from `seed` concurrently.
std::vector<TrainOutcome> run_batch(const RunConfig& cfg, const Hamiltonian& h, std::uint64_t seed,
                                    std::size_t count, bool pretrain);

/// Entry point of the command-line tool; returns the process exit code.
int run(int argc, char** argv);

}  // namespace mpsvqe::cli
