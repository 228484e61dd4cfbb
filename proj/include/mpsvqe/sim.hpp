#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mpsvqe/pauli.hpp"

namespace mpsvqe {

using cplx = std::complex<double>;

/// Pure state on n qubits; qubit 0 is the most significant index bit.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t n_qubits);  // |0...0>
  StateVector(std::size_t n_qubits, std::vector<cplx> amplitudes);

  static StateVector basis(std::size_t n_qubits, std::uint64_t index);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  void normalize();

  /// <this|other>
  cplx inner(const StateVector& other) const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<cplx> amps_;
};

/// Mixed state stored row-major. Treated internally as a 2n-qubit vector
/// whose high n bits index rows, so a row-side operation on qubit q acts on
/// bit q and the matching column-side operation on bit n+q.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(std::size_t n_qubits);  // |0...0><0...0|
  explicit DensityMatrix(const StateVector& pure);

  static DensityMatrix maximally_mixed(std::size_t n_qubits);
  static DensityMatrix from_matrix(const Eigen::MatrixXcd& rho);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return std::size_t{1} << n_qubits_; }
  cplx operator()(std::size_t r, std::size_t c) const { return data_[r * dim() + c]; }
  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  cplx trace() const;
  double purity() const;
  Eigen::MatrixXcd matrix() const;
  std::vector<double> diagonal() const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<cplx> data_;
};

namespace gates {
Eigen::Matrix2cd rz(double theta);
Eigen::Matrix2cd ry(double theta);
Eigen::Matrix2cd x();
Eigen::Matrix2cd h();
Eigen::Matrix2cd sdg();
Eigen::Matrix4cd cnot();  // control = first target
}  // namespace gates

/// Applies a 2^k x 2^k matrix to k target bits of an amplitude vector with
/// n_bits bits (bit q counted from the most significant end). Targets must be
/// distinct; the first target is the most significant bit of the local index.
void apply_matrix(std::span<cplx> amps, std::size_t n_bits, std::span<const std::size_t> targets,
                  const Eigen::MatrixXcd& m);

void apply_gate(StateVector& psi, const Eigen::MatrixXcd& u, std::span<const std::size_t> targets);
void apply_gate(DensityMatrix& rho, const Eigen::MatrixXcd& u,
                std::span<const std::size_t> targets);

class KrausChannel {
 public:
  static constexpr double kCompletenessTolerance = 1e-10;

  /// Throws ValidationError unless the operators are square, share dimension
  /// 2 or 4, and satisfy sum K^dag K = I.
  explicit KrausChannel(std::vector<Eigen::MatrixXcd> operators);

  const std::vector<Eigen::MatrixXcd>& operators() const { return ops_; }
  std::size_t n_qubits() const { return ops_.front().rows() == 2 ? 1 : 2; }
  std::size_t dim() const { return static_cast<std::size_t>(ops_.front().rows()); }

  /// Max-abs deviation of sum K^dag K from the identity.
  double completeness_error() const;

  /// sum K (x) conj(K), acting on vec(rho) with the row index major.
  Eigen::MatrixXcd superoperator() const;

  /// Channel that applies `first` and then `this`.
  KrausChannel after(const KrausChannel& first) const;

 private:
  std::vector<Eigen::MatrixXcd> ops_;
};

KrausChannel identity_channel(std::size_t k);
KrausChannel depolarizing_channel(double p, std::size_t k);
KrausChannel amplitude_damping_channel(double gamma);
KrausChannel phase_flip_channel(double p);
/// T1 and T2 in microseconds, gate time in nanoseconds.
KrausChannel thermal_relaxation_channel(double t1_us, double t2_us, double t_ns);
KrausChannel bitflip_channel(double p);

void apply_channel(DensityMatrix& rho, const KrausChannel& ch, std::span<const std::size_t> targets);

/// Applies a precomputed superoperator (dimension 4^k) to k target qubits.
void apply_superoperator(DensityMatrix& rho, const Eigen::MatrixXcd& superop,
                         std::span<const std::size_t> targets);

struct NoiseModel {
  double p_depol_1q = 0.001;
  double p_depol_2q = 0.004;
  double t1_us = 100.0;
  double t2_us = 50.0;
  double t_gate_1q_ns = 30.0;
  double t_gate_2q_ns = 80.0;
  double p_meas_flip = 0.05;

  static NoiseModel paper() { return {}; }
  static NoiseModel none() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {0.0, 0.0, inf, inf, 30.0, 80.0, 0.0};
  }

  void validate() const;
  bool gates_noiseless() const;

  /// Channel appended after every single-qubit gate: depolarizing then
  /// thermal relaxation.
  KrausChannel one_qubit_channel() const;
  /// Channel appended after every two-qubit gate: two-qubit depolarizing then
  /// thermal relaxation on each qubit.
  KrausChannel two_qubit_channel() const;
};

/// Pauli sum compiled for repeated expectation values: terms sharing an
/// X-support are folded into one diagonal phase vector.
class PauliSumKernel {
 public:
  explicit PauliSumKernel(const Hamiltonian& h);

  std::size_t n_qubits() const { return n_qubits_; }
  double expectation(const StateVector& psi) const;
  double expectation(const DensityMatrix& rho) const;

 private:
  std::size_t n_qubits_;
  std::vector<std::uint64_t> x_masks_;
  std::vector<std::vector<cplx>> diagonals_;  // d_x[c] = sum_P coeff * <c^x|P|c>
};

double expectation(const StateVector& psi, const Hamiltonian& h);
double expectation(const DensityMatrix& rho, const Hamiltonian& h);

/// Measures one group: rotates a copy of the state into the group basis,
/// draws `shots` bitstrings, flips each bit with p_meas_flip, and returns the
/// empirical <P> for every member in member order. Identity members read 1.
std::vector<double> sample_group(const StateVector& psi, const Hamiltonian& h,
                                 const MeasurementGroup& group, std::size_t shots,
                                 double p_meas_flip, std::uint64_t seed);
std::vector<double> sample_group(const DensityMatrix& rho, const Hamiltonian& h,
                                 const MeasurementGroup& group, std::size_t shots,
                                 double p_meas_flip, std::uint64_t seed);

/// Deterministic 64-bit stream splitting (SplitMix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mpsvqe
