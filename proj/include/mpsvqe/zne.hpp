#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpsvqe/circuit.hpp"
#include "mpsvqe/mlp.hpp"
#include "mpsvqe/vqe.hpp"

namespace mpsvqe::zne {

struct ScalePoint {
  double lambda = 1.0;            // achieved scale
  std::vector<double> estimates;  // Hartree

  double mean() const;
};

enum class ModelKind : std::uint8_t { Linear, Polynomial, Exponential, Mlp };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct MlpSpec {
  std::size_t hidden1 = 16;
  std::size_t hidden2 = 16;
  std::string activation = "tanh";
  std::size_t epochs = 5000;
  double learning_rate = 1e-2;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ExtrapolationModel {
  ModelKind kind = ModelKind::Linear;
  int degree = 1;              // polynomial only
  std::vector<double> params;  // linear/poly: c0..cd; exponential: a, b, c
  double fit_residual = 0.0;   // mean squared residual over all estimates
  bool fitted = false;
  bool fell_back_to_linear = false;

  // MLP state: network on standardised inputs and outputs.
  std::optional<Mlp> network;
  double x_min = 0.0, x_span = 1.0, y_mean = 0.0, y_scale = 1.0;

  double evaluate(double lambda) const;
};

/// Least-squares fit to every (lambda, estimate) pair. Exponential fits
/// E = a + b exp(-c lambda) with c > 0 and fall back to linear (flagged)
/// when no decaying fit beats the line.
ExtrapolationModel fit(ModelKind kind, std::span<const ScalePoint> data, const MlpSpec& spec = {},
                       int degree = 2);

/// f(0) of a fitted model.
double extrapolate(const ExtrapolationModel& model);

/// Evaluates the folded circuit at each scale `repeats` times under the
/// unscaled noise model. Scales must be ascending and start at 1.
std::vector<ScalePoint> collect(const ParamCircuit& c, std::span<const double> theta, const Hamiltonian& h,
                                const NoiseModel& noise, std::span<const double> scales, FoldMode mode,
                                const EnergyEstimator& est, std::size_t repeats, std::uint64_t seed);

struct ZneConfig {
  std::vector<double> scales{1.0, 3.0, 5.0};
  FoldMode fold_mode = FoldMode::PerGate;
  ModelKind model = ModelKind::Mlp;
  int degree = 2;
  MlpSpec mlp;
  std::size_t repeats = 1;
  EnergyEstimator estimator;  // its noise field is replaced by the pipeline noise
  std::uint64_t seed = 0;
};

struct ZneDiagnostics {
  std::vector<ScalePoint> points;
  ExtrapolationModel model;
  double linear_residual = 0.0;
  bool interpolation_warning = false;  // MLP residual < 1e-12
};

std::pair<double, ZneDiagnostics> mitigated_energy(const ParamCircuit& c, std::span<const double> theta,
                                                   const Hamiltonian& h, const NoiseModel& noise,
                                                   const ZneConfig& cfg);

}  // namespace mpsvqe::zne
