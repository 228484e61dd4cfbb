#include "mpsvqe/vqe.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>

#include "mpsvqe/errors.hpp"

namespace mpsvqe {

namespace {
constexpr std::size_t kNoShift = static_cast<std::size_t>(-1);
constexpr double kHalfPi = std::numbers::pi / 2;
constexpr std::size_t kWindow = 10;
}  // namespace

void EnergyEstimator::validate() const {
  if (mode == EstimatorMode::Sampled && shots < 1) throw ValidationError("sampled mode needs shots >= 1");
  if (noise) noise->validate();
}

Objective::Objective(ParamCircuit circuit, const Hamiltonian& h, EnergyEstimator est)
    : circuit_(std::move(circuit)), h_(h), est_(std::move(est)), kernel_(h) {
  est_.validate();
  if (circuit_.n_qubits() != h_.n_qubits())
    throw ValidationError("circuit has " + std::to_string(circuit_.n_qubits()) + " qubits, Hamiltonian " +
                          std::to_string(h_.n_qubits()));
  if (est_.mode == EstimatorMode::Sampled) groups_ = group_terms(h_);
  if (est_.noise) executor_.emplace(*est_.noise);
}

void Objective::check(std::span<const double> theta) const {
  if (theta.size() != circuit_.n_params())
    throw ValidationError("parameter vector has length " + std::to_string(theta.size()) + ", circuit expects " +
                          std::to_string(circuit_.n_params()));
}

double Objective::measure(const StateVector& psi, std::uint64_t seed) const {
  if (est_.mode == EstimatorMode::Exact) return kernel_.expectation(psi);
  const double flip = est_.noise ? est_.noise->p_meas_flip : 0.0;
  double e = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto vals = sample_group(psi, h_, groups_[g], est_.shots, flip, derive_seed(seed, g));
    for (std::size_t m = 0; m < vals.size(); ++m) e += h_.terms()[groups_[g].member_indices[m]].coeff * vals[m];
  }
  return e;
}

double Objective::measure(const DensityMatrix& rho, std::uint64_t seed) const {
  if (est_.mode == EstimatorMode::Exact) return kernel_.expectation(rho);
  const double flip = est_.noise ? est_.noise->p_meas_flip : 0.0;
  double e = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto vals = sample_group(rho, h_, groups_[g], est_.shots, flip, derive_seed(seed, g));
    for (std::size_t m = 0; m < vals.size(); ++m) e += h_.terms()[groups_[g].member_indices[m]].coeff * vals[m];
  }
  return e;
}

double Objective::shifted_energy(std::span<const double> theta, std::size_t shifted, double offset,
                                 std::uint64_t seed) const {
  const auto& gates = circuit_.gates();
  double e;
  if (executor_) {
    DensityMatrix rho(circuit_.n_qubits());
    for (std::size_t i = 0; i < gates.size(); ++i) executor_->apply(gates[i], theta, rho, i == shifted ? offset : 0.0);
    e = measure(rho, seed);
  } else {
    StateVector psi(circuit_.n_qubits());
    for (std::size_t i = 0; i < gates.size(); ++i) apply(gates[i], theta, psi, i == shifted ? offset : 0.0);
    e = measure(psi, seed);
  }
  if (!std::isfinite(e)) throw NumericalError("non-finite energy");
  return e;
}

double Objective::energy(std::span<const double> theta, std::uint64_t seed) const {
  check(theta);
  return shifted_energy(theta, kNoShift, 0.0, seed);
}

std::vector<double> Objective::gradient(std::span<const double> theta, std::uint64_t seed) const {
  return energy_and_gradient(theta, seed).second;
}

std::pair<double, std::vector<double>> Objective::energy_and_gradient(std::span<const double> theta,
                                                                      std::uint64_t seed) const {
  check(theta);
  const auto& gates = circuit_.gates();
  std::vector<double> grad(circuit_.n_params(), 0.0);

  if (executor_ || est_.mode == EstimatorMode::Sampled) {
    const double e = shifted_energy(theta, kNoShift, 0.0, derive_seed(seed, 0));
    for (std::size_t i = 0; i < gates.size(); ++i) {
      if (!gates[i].param) continue;
      const double plus = shifted_energy(theta, i, kHalfPi, derive_seed(seed, 2 * i + 1));
      const double minus = shifted_energy(theta, i, -kHalfPi, derive_seed(seed, 2 * i + 2));
      grad[gates[i].param->index] += gates[i].param->scale * (plus - minus) / 2;
    }
    return {e, grad};
  }

  // Noiseless exact: cache the state in front of every gate.
  std::vector<StateVector> prefix;
  prefix.reserve(gates.size() + 1);
  prefix.emplace_back(circuit_.n_qubits());
  for (const Gate& g : gates) {
    prefix.push_back(prefix.back());
    apply(g, theta, prefix.back());
  }
  const double e = kernel_.expectation(prefix.back());
  if (!std::isfinite(e)) throw NumericalError("non-finite energy");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (!gates[i].param) continue;
    double shifted[2];
    for (int k = 0; k < 2; ++k) {
      StateVector psi = prefix[i];
      apply(gates[i], theta, psi, k == 0 ? kHalfPi : -kHalfPi);
      for (std::size_t j = i + 1; j < gates.size(); ++j) apply(gates[j], theta, psi);
      shifted[k] = kernel_.expectation(psi);
    }
    grad[gates[i].param->index] += gates[i].param->scale * (shifted[0] - shifted[1]) / 2;
  }
  return {e, grad};
}

double energy(const ParamCircuit& c, std::span<const double> theta, const Hamiltonian& h,
              const EnergyEstimator& est, std::uint64_t seed) {
  return Objective(c, h, est).energy(theta, seed);
}

std::vector<double> gradient(const ParamCircuit& c, std::span<const double> theta, const Hamiltonian& h,
                             const EnergyEstimator& est, std::uint64_t seed) {
  return Objective(c, h, est).gradient(theta, seed);
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("learning_rate must be a finite non-negative number");
  if (max_iters < 1) throw ValidationError("max_iters must be positive");
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "iter,energy_hartree,grad_norm,wall_ms\n";
  const auto flags = out.flags();
  for (const auto& r : records)
    out << r.iter << ',' << std::setprecision(10) << r.energy << ',' << r.grad_norm << ','
        << std::setprecision(6) << r.wall_ms << '\n';
  out.flags(flags);
}

TrainResult train(const Objective& obj, std::span<const double> theta_init, const TrainConfig& cfg) {
  cfg.validate();
  if (theta_init.size() != obj.circuit().n_params())
    throw ValidationError("initial parameter vector has length " + std::to_string(theta_init.size()) +
                          ", circuit expects " + std::to_string(obj.circuit().n_params()));
  std::vector<double> theta(theta_init.begin(), theta_init.end());
  TrainResult result{theta, std::numeric_limits<double>::infinity(), {}};
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    auto [e, grad] = obj.energy_and_gradient(theta, derive_seed(cfg.seed, it));
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (!std::isfinite(e) || !std::isfinite(norm))
      throw NumericalError("training produced a non-finite value at iteration " + std::to_string(it));
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.trace.records.push_back({it, e, norm, ms});
    if (e < result.best_energy) {
      result.best_energy = e;
      result.theta = theta;
    }
    const auto& rec = result.trace.records;
    if (rec.size() > kWindow && std::abs(e - rec[rec.size() - 1 - kWindow].energy) < cfg.tol) break;
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= cfg.learning_rate * grad[j];
  }
  return result;
}

TrainResult train(const ParamCircuit& c, std::span<const double> theta_init, const Hamiltonian& h,
                  const EnergyEstimator& est, const TrainConfig& cfg) {
  return train(Objective(c, h, est), theta_init, cfg);
}

}  // namespace mpsvqe
