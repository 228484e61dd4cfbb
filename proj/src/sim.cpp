#include "mpsvqe/sim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <random>

#include "mpsvqe/errors.hpp"

namespace mpsvqe {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t dim_of(std::size_t n) { return std::size_t{1} << n; }

// Inserts a zero bit at each (ascending) position.
inline std::size_t spread(std::size_t i, std::span<const std::size_t> sorted_positions) {
  for (std::size_t pos : sorted_positions) {
    const std::size_t low = i & ((std::size_t{1} << pos) - 1);
    i = ((i >> pos) << (pos + 1)) | low;
  }
  return i;
}

void check_targets(std::size_t n_qubits, std::span<const std::size_t> targets, std::size_t k) {
  if (targets.size() != k)
    throw ValidationError("operator acts on " + std::to_string(k) + " qubit(s) but " +
                          std::to_string(targets.size()) + " target(s) given");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= n_qubits)
      throw ValidationError("target qubit " + std::to_string(targets[i]) + " out of range for " +
                            std::to_string(n_qubits) + " qubits");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw ValidationError("repeated target qubit");
  }
}

std::size_t arity_of(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw ValidationError("operator matrix is not square");
  const auto d = static_cast<std::size_t>(m.rows());
  if (d < 2 || !std::has_single_bit(d)) throw ValidationError("operator dimension is not 2^k");
  return static_cast<std::size_t>(std::countr_zero(d));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Eigen::Matrix2cd pauli_matrix(int which) {
  return matrix_of(PauliString({static_cast<Pauli>(which)}));
}

void validate_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
}

std::vector<double> sample_probabilities(std::vector<double> probs, const Hamiltonian& h,
                                         const MeasurementGroup& group, std::size_t shots,
                                         double p_meas_flip, std::uint64_t seed) {
  if (shots == 0) throw ValidationError("shots must be >= 1");
  validate_probability(p_meas_flip, "p_meas_flip");
  for (double& p : probs) p = std::max(p, 0.0);

  const std::size_t n = h.n_qubits();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> outcome(probs.begin(), probs.end());
  std::bernoulli_distribution flip(p_meas_flip);

  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::size_t s = 0; s < shots; ++s) {
    std::size_t bits = outcome(rng);
    if (p_meas_flip > 0.0)
      for (std::size_t q = 0; q < n; ++q)
        if (flip(rng)) bits ^= std::size_t{1} << (n - 1 - q);
    ++counts[bits];
  }

  std::vector<double> estimates;
  estimates.reserve(group.member_indices.size());
  for (std::size_t idx : group.member_indices) {
    const PauliString& s = h.terms()[idx].string;
    const std::uint64_t support = s.x_mask() | s.z_mask();
    if (support == 0) {
      estimates.push_back(1.0);
      continue;
    }
    std::int64_t acc = 0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
      if (counts[b] == 0) continue;
      const auto c = static_cast<std::int64_t>(counts[b]);
      acc += (std::popcount(b & support) % 2 == 0) ? c : -c;
    }
    estimates.push_back(static_cast<double>(acc) / static_cast<double>(shots));
  }
  return estimates;
}

void check_group(const Hamiltonian& h, const MeasurementGroup& group) {
  if (!is_valid_group(h, group))
    throw ValidationError("measurement group is not valid for this Hamiltonian");
}

template <class State>
void rotate_into_basis(State& state, const MeasurementGroup& group) {
  static const Eigen::MatrixXcd kFromX = gates::h();
  static const Eigen::MatrixXcd kFromY = gates::h() * gates::sdg();
  for (std::size_t q = 0; q < group.basis_rotation.size(); ++q) {
    const std::array<std::size_t, 1> t{q};
    if (group.basis_rotation[q] == Basis::X) apply_gate(state, kFromX, t);
    if (group.basis_rotation[q] == Basis::Y) apply_gate(state, kFromY, t);
  }
}

}  // namespace

// ---------------------------------------------------------------- states

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits), amps_(dim_of(n_qubits)) {
  amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (amps_.size() != dim_of(n_qubits))
    throw ValidationError("amplitude count does not match 2^n_qubits");
}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw ValidationError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const cplx& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

void StateVector::normalize() {
  const double nrm = norm();
  if (nrm == 0.0) throw NumericalError("cannot normalise a zero state");
  for (cplx& a : amps_) a /= nrm;
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw ValidationError("state dimensions differ");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

DensityMatrix::DensityMatrix(std::size_t n_qubits)
    : n_qubits_(n_qubits), data_(dim_of(n_qubits) * dim_of(n_qubits)) {
  data_[0] = 1.0;
}

DensityMatrix::DensityMatrix(const StateVector& pure)
    : n_qubits_(pure.n_qubits()), data_(pure.dim() * pure.dim()) {
  const std::size_t d = pure.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) data_[r * d + c] = pure[r] * std::conj(pure[c]);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
  DensityMatrix rho(n_qubits);
  const std::size_t d = rho.dim();
  rho.data_[0] = 0.0;
  for (std::size_t i = 0; i < d; ++i) rho.data_[i * d + i] = 1.0 / static_cast<double>(d);
  return rho;
}

DensityMatrix DensityMatrix::from_matrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || !std::has_single_bit(static_cast<std::size_t>(m.rows())))
    throw ValidationError("density matrix must be square with dimension 2^n");
  DensityMatrix rho(static_cast<std::size_t>(std::countr_zero(static_cast<std::size_t>(m.rows()))));
  const std::size_t d = rho.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      rho.data_[r * d + c] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return rho;
}

cplx DensityMatrix::trace() const {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) acc += data_[i * dim() + i];
  return acc;
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_rc|^2 for Hermitian rho
  double acc = 0.0;
  for (const cplx& v : data_) acc += std::norm(v);
  return acc;
}

Eigen::MatrixXcd DensityMatrix::matrix() const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = data_[static_cast<std::size_t>(r * d + c)];
  return m;
}

std::vector<double> DensityMatrix::diagonal() const {
  std::vector<double> diag(dim());
  for (std::size_t i = 0; i < dim(); ++i) diag[i] = data_[i * dim() + i].real();
  return diag;
}

// ---------------------------------------------------------------- gates

namespace gates {

Eigen::Matrix2cd rz(double theta) {
  Eigen::Matrix2cd m;
  m << std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2);
  return m;
}

Eigen::Matrix2cd ry(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::Matrix2cd m;
  m << c, -s, s, c;
  return m;
}

Eigen::Matrix2cd x() { return pauli_matrix(1); }

Eigen::Matrix2cd h() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  m << r, r, r, -r;
  return m;
}

Eigen::Matrix2cd sdg() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, cplx(0, -1);
  return m;
}

Eigen::Matrix4cd cnot() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return m;
}

}  // namespace gates

void apply_matrix(std::span<cplx> amps, std::size_t n_bits, std::span<const std::size_t> targets,
                  const Eigen::MatrixXcd& m) {
  const std::size_t k = targets.size();
  const std::size_t local_dim = std::size_t{1} << k;
  if (static_cast<std::size_t>(m.rows()) != local_dim)
    throw ValidationError("matrix dimension does not match target count");

  std::array<std::size_t, 8> positions{};
  std::array<std::size_t, 8> sorted{};
  for (std::size_t j = 0; j < k; ++j) positions[j] = sorted[j] = n_bits - 1 - targets[j];
  std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k));

  std::array<std::size_t, 256> offset{};
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t o = 0;
    for (std::size_t j = 0; j < k; ++j)
      if ((l >> (k - 1 - j)) & 1) o |= std::size_t{1} << positions[j];
    offset[l] = o;
  }

  const std::size_t outer = amps.size() >> k;
  const std::span<const std::size_t> sorted_view(sorted.data(), k);
  if (k == 1) {
    const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    const std::size_t stride = offset[1];
    for (std::size_t i = 0; i < outer; ++i) {
      const std::size_t base = spread(i, sorted_view);
      const cplx a0 = amps[base], a1 = amps[base + stride];
      amps[base] = m00 * a0 + m01 * a1;
      amps[base + stride] = m10 * a0 + m11 * a1;
    }
    return;
  }

  std::array<cplx, 256> in{};
  for (std::size_t i = 0; i < outer; ++i) {
    const std::size_t base = spread(i, sorted_view);
    for (std::size_t l = 0; l < local_dim; ++l) in[l] = amps[base + offset[l]];
    for (std::size_t r = 0; r < local_dim; ++r) {
      cplx acc = 0.0;
      for (std::size_t c = 0; c < local_dim; ++c)
        acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      amps[base + offset[r]] = acc;
    }
  }
}

void apply_gate(StateVector& psi, const Eigen::MatrixXcd& u, std::span<const std::size_t> targets) {
  check_targets(psi.n_qubits(), targets, arity_of(u));
  apply_matrix(psi.amplitudes(), psi.n_qubits(), targets, u);
}

void apply_gate(DensityMatrix& rho, const Eigen::MatrixXcd& u,
                std::span<const std::size_t> targets) {
  const std::size_t n = rho.n_qubits();
  check_targets(n, targets, arity_of(u));
  std::array<std::size_t, 8> cols{};
  for (std::size_t j = 0; j < targets.size(); ++j) cols[j] = n + targets[j];
  apply_matrix(rho.data(), 2 * n, targets, u);
  apply_matrix(rho.data(), 2 * n, std::span<const std::size_t>(cols.data(), targets.size()),
               u.conjugate());
}

// ---------------------------------------------------------------- channels

KrausChannel::KrausChannel(std::vector<Eigen::MatrixXcd> operators) : ops_(std::move(operators)) {
  if (ops_.empty()) throw ValidationError("Kraus channel needs at least one operator");
  const Eigen::Index d = ops_.front().rows();
  if (d != 2 && d != 4) throw ValidationError("Kraus operators must be 2x2 or 4x4");
  for (const auto& k : ops_)
    if (k.rows() != d || k.cols() != d)
      throw ValidationError("Kraus operators differ in dimension");
  if (completeness_error() > kCompletenessTolerance)
    throw ValidationError("Kraus operators violate completeness (error " +
                          std::to_string(completeness_error()) + ")");
}

double KrausChannel::completeness_error() const {
  const Eigen::Index d = ops_.front().rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : ops_) sum += k.adjoint() * k;
  return (sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd KrausChannel::superoperator() const {
  const Eigen::Index d = ops_.front().rows();
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (const auto& k : ops_) s += kron(k, k.conjugate());
  return s;
}

KrausChannel KrausChannel::after(const KrausChannel& first) const {
  if (first.dim() != dim()) throw ValidationError("cannot compose channels of different size");
  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(ops_.size() * first.ops_.size());
  for (const auto& b : ops_)
    for (const auto& a : first.ops_) ops.push_back(b * a);
  return KrausChannel(std::move(ops));
}

KrausChannel identity_channel(std::size_t k) {
  if (k != 1 && k != 2) throw ValidationError("channels act on 1 or 2 qubits");
  const Eigen::Index d = Eigen::Index{1} << k;
  return KrausChannel({Eigen::MatrixXcd::Identity(d, d)});
}

KrausChannel depolarizing_channel(double p, std::size_t k) {
  validate_probability(p, "depolarizing probability");
  if (k != 1 && k != 2) throw ValidationError("depolarizing channel acts on 1 or 2 qubits");
  if (p == 0.0) return identity_channel(k);
  const std::size_t n_paulis = (std::size_t{1} << (2 * k)) - 1;
  std::vector<Eigen::MatrixXcd> ops;
  const Eigen::Index d = Eigen::Index{1} << k;
  if (p < 1.0) ops.push_back(std::sqrt(1.0 - p) * Eigen::MatrixXcd::Identity(d, d));
  const double w = std::sqrt(p / static_cast<double>(n_paulis));
  for (std::size_t idx = 1; idx <= n_paulis; ++idx) {
    Eigen::MatrixXcd op = pauli_matrix(static_cast<int>(idx % 4));
    if (k == 2) op = kron(pauli_matrix(static_cast<int>(idx / 4)), op);
    ops.push_back(w * op);
  }
  return KrausChannel(std::move(ops));
}

KrausChannel amplitude_damping_channel(double gamma) {
  validate_probability(gamma, "damping rate");
  Eigen::MatrixXcd k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  return KrausChannel({k0, k1});
}

KrausChannel phase_flip_channel(double p) {
  validate_probability(p, "phase-flip probability");
  return KrausChannel({std::sqrt(1.0 - p) * Eigen::MatrixXcd::Identity(2, 2),
                       std::sqrt(p) * Eigen::MatrixXcd(pauli_matrix(3))});
}

KrausChannel thermal_relaxation_channel(double t1_us, double t2_us, double t_ns) {
  if (!(t1_us > 0.0) || !(t2_us > 0.0)) throw ValidationError("T1 and T2 must be positive");
  if (!(t_ns > 0.0)) throw ValidationError("gate time must be positive");
  if (t2_us > 2.0 * t1_us * (1.0 + 1e-12))
    throw ValidationError("thermal relaxation requires T2 <= 2*T1");
  const double t_us = t_ns * 1e-3;
  const double gamma = -std::expm1(-t_us / t1_us);
  const double dephasing_rate = std::max(0.0, 1.0 / t2_us - 0.5 / t1_us);  // 1/T_phi
  const double p_z = -0.5 * std::expm1(-t_us * dephasing_rate);
  return phase_flip_channel(p_z).after(amplitude_damping_channel(gamma));
}

KrausChannel bitflip_channel(double p) {
  validate_probability(p, "bit-flip probability");
  return KrausChannel({std::sqrt(1.0 - p) * Eigen::MatrixXcd::Identity(2, 2),
                       std::sqrt(p) * Eigen::MatrixXcd(pauli_matrix(1))});
}

void apply_superoperator(DensityMatrix& rho, const Eigen::MatrixXcd& superop,
                         std::span<const std::size_t> targets) {
  const std::size_t n = rho.n_qubits();
  const std::size_t k = targets.size();
  if (static_cast<std::size_t>(superop.rows()) != (std::size_t{1} << (2 * k)))
    throw ValidationError("superoperator dimension does not match target count");
  check_targets(n, targets, k);
  std::array<std::size_t, 8> bits{};
  for (std::size_t j = 0; j < k; ++j) {
    bits[j] = targets[j];
    bits[k + j] = n + targets[j];
  }
  apply_matrix(rho.data(), 2 * n, std::span<const std::size_t>(bits.data(), 2 * k), superop);
}

void apply_channel(DensityMatrix& rho, const KrausChannel& ch,
                   std::span<const std::size_t> targets) {
  if (targets.size() != ch.n_qubits())
    throw ValidationError("channel acts on " + std::to_string(ch.n_qubits()) +
                          " qubit(s) but " + std::to_string(targets.size()) + " target(s) given");
  apply_superoperator(rho, ch.superoperator(), targets);
}

// ---------------------------------------------------------------- noise model

void NoiseModel::validate() const {
  validate_probability(p_depol_1q, "p_depol_1q");
  validate_probability(p_depol_2q, "p_depol_2q");
  validate_probability(p_meas_flip, "p_meas_flip");
  if (!(t1_us > 0) || !(t2_us > 0) || !(t_gate_1q_ns > 0) || !(t_gate_2q_ns > 0))
    throw ValidationError("noise model times must be positive");
  if (std::isfinite(t1_us) && t2_us > 2.0 * t1_us * (1.0 + 1e-12))
    throw ValidationError("noise model requires T2 <= 2*T1");
}

bool NoiseModel::gates_noiseless() const {
  return p_depol_1q == 0.0 && p_depol_2q == 0.0 && std::isinf(t1_us) && std::isinf(t2_us);
}

KrausChannel NoiseModel::one_qubit_channel() const {
  validate();
  return thermal_relaxation_channel(t1_us, t2_us, t_gate_1q_ns)
      .after(depolarizing_channel(p_depol_1q, 1));
}

KrausChannel NoiseModel::two_qubit_channel() const {
  validate();
  const KrausChannel relax = thermal_relaxation_channel(t1_us, t2_us, t_gate_2q_ns);
  std::vector<Eigen::MatrixXcd> pair;
  for (const auto& a : relax.operators())
    for (const auto& b : relax.operators()) pair.push_back(kron(a, b));
  return KrausChannel(std::move(pair)).after(depolarizing_channel(p_depol_2q, 2));
}

// ---------------------------------------------------------------- observables

PauliSumKernel::PauliSumKernel(const Hamiltonian& h) : n_qubits_(h.n_qubits()) {
  if (n_qubits_ > 30) throw SizeGuardError("PauliSumKernel supports at most 30 qubits");
  const std::size_t d = dim_of(n_qubits_);
  std::map<std::uint64_t, std::size_t> slot;
  for (const auto& term : h.terms()) {
    const std::uint64_t x = term.string.x_mask();
    const std::uint64_t z = term.string.z_mask();
    const cplx y_phase = Phase{static_cast<int>(term.string.y_count() % 4)}.value();
    auto [it, inserted] = slot.try_emplace(x, x_masks_.size());
    if (inserted) {
      x_masks_.push_back(x);
      diagonals_.emplace_back(d, cplx(0.0));
    }
    auto& diag = diagonals_[it->second];
    for (std::size_t c = 0; c < d; ++c) {
      const double sign = (std::popcount(c & z) % 2 == 0) ? 1.0 : -1.0;
      diag[c] += term.coeff * sign * y_phase;
    }
  }
}

double PauliSumKernel::expectation(const StateVector& psi) const {
  if (psi.n_qubits() != n_qubits_) throw ValidationError("state and Hamiltonian qubit counts differ");
  const auto amps = psi.amplitudes();
  cplx acc = 0.0;
  for (std::size_t g = 0; g < x_masks_.size(); ++g) {
    const std::uint64_t x = x_masks_[g];
    const auto& diag = diagonals_[g];
    for (std::size_t c = 0; c < amps.size(); ++c) acc += std::conj(amps[c ^ x]) * diag[c] * amps[c];
  }
  return acc.real();
}

double PauliSumKernel::expectation(const DensityMatrix& rho) const {
  if (rho.n_qubits() != n_qubits_) throw ValidationError("state and Hamiltonian qubit counts differ");
  const std::size_t d = rho.dim();
  const auto data = rho.data();
  cplx acc = 0.0;
  for (std::size_t g = 0; g < x_masks_.size(); ++g) {
    const std::uint64_t x = x_masks_[g];
    const auto& diag = diagonals_[g];
    for (std::size_t c = 0; c < d; ++c) acc += diag[c] * data[c * d + (c ^ x)];
  }
  return acc.real();
}

double expectation(const StateVector& psi, const Hamiltonian& h) {
  return PauliSumKernel(h).expectation(psi);
}

double expectation(const DensityMatrix& rho, const Hamiltonian& h) {
  return PauliSumKernel(h).expectation(rho);
}

std::vector<double> sample_group(const StateVector& psi, const Hamiltonian& h,
                                 const MeasurementGroup& group, std::size_t shots,
                                 double p_meas_flip, std::uint64_t seed) {
  if (psi.n_qubits() != h.n_qubits()) throw ValidationError("state and Hamiltonian qubit counts differ");
  check_group(h, group);
  StateVector rotated = psi;
  rotate_into_basis(rotated, group);
  std::vector<double> probs(rotated.dim());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(rotated[i]);
  return sample_probabilities(std::move(probs), h, group, shots, p_meas_flip, seed);
}

std::vector<double> sample_group(const DensityMatrix& rho, const Hamiltonian& h,
                                 const MeasurementGroup& group, std::size_t shots,
                                 double p_meas_flip, std::uint64_t seed) {
  if (rho.n_qubits() != h.n_qubits()) throw ValidationError("state and Hamiltonian qubit counts differ");
  check_group(h, group);
  DensityMatrix rotated = rho;
  rotate_into_basis(rotated, group);
  return sample_probabilities(rotated.diagonal(), h, group, shots, p_meas_flip, seed);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mpsvqe
