#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mpsvqe/pauli.hpp"
#include "mpsvqe/sim.hpp"

namespace mpsvqe::mps {

/// Rank-3 site tensor A[l, s, r] stored as one (left x right) slice per
/// physical value s in {0, 1}.
struct LocalTensor {
  std::array<Eigen::MatrixXcd, 2> slice;

  LocalTensor() = default;
  LocalTensor(Eigen::Index left, Eigen::Index right);

  Eigen::Index left() const { return slice[0].rows(); }
  Eigen::Index right() const { return slice[0].cols(); }
  double squared_norm() const { return slice[0].squaredNorm() + slice[1].squaredNorm(); }
};

/// Open-boundary matrix product state over qubits 0..N-1 (site n <-> qubit n).
class MPS {
 public:
  MPS() = default;
  MPS(std::vector<LocalTensor> tensors, std::size_t max_bond,
      std::optional<std::size_t> center = std::nullopt);

  std::size_t size() const { return tensors_.size(); }
  std::size_t max_bond() const { return max_bond_; }
  std::optional<std::size_t> center() const { return center_; }
  const std::vector<LocalTensor>& tensors() const { return tensors_; }
  const LocalTensor& operator[](std::size_t n) const { return tensors_[n]; }

  /// Largest virtual bond dimension actually present.
  std::size_t bond_dimension() const;
  double norm() const;

  // Raw access for algorithms that maintain the gauge themselves.
  LocalTensor& tensor(std::size_t n) { return tensors_[n]; }
  void set_center(std::optional<std::size_t> c) { center_ = c; }

 private:
  std::vector<LocalTensor> tensors_;
  std::size_t max_bond_ = 2;
  std::optional<std::size_t> center_;
};

/// Bond-dimension-1 MPS of a computational basis state ("0110" etc).
MPS from_product_state(std::string_view bits, std::size_t max_bond = 2);

/// Exact SVD decomposition of a dense state, truncated to max_bond.
MPS from_dense(const StateVector& psi, std::size_t max_bond);

/// Random normalised MPS with bonds min(chi, 2^k, 2^(N-k)).
MPS random_mps(std::size_t n_sites, std::size_t chi, std::uint64_t seed);

/// Pads every bond to min(chi, 2^k, 2^(N-k)), adds complex Gaussian noise of
/// the given amplitude to all entries, and renormalises (center 0).
MPS perturbed(const MPS& m, std::size_t chi, double amplitude, std::uint64_t seed);

/// QR sweeps from both ends so that sites left of `center` are left
/// isometries and sites right of it are right isometries.
MPS canonicalize(const MPS& m, std::size_t center);

/// Max-abs deviation of sum_s A_s^dag A_s (left) or sum_s A_s A_s^dag (right)
/// from the identity.
double left_orthogonality_error(const LocalTensor& a);
double right_orthogonality_error(const LocalTensor& a);
/// Largest violation of the isometry conditions implied by m.center().
double canonical_error(const MPS& m);

StateVector dense(const MPS& m);  // N <= 12

/// <psi|H|psi> / <psi|psi> using environments that start at the first
/// non-identity site of each term (or the center, whichever is closer) and
/// rely on the isometry conditions elsewhere. Throws ValidationError when m
/// has no center or violates its canonical form by more than 1e-8.
double energy(const MPS& m, const Hamiltonian& h);

struct SweepConfig {
  double learning_rate = 0.05;
  std::size_t n_sweeps = 50;
  double convergence_tol = 1e-9;  // Hartree, between sweep endpoints
};

struct PretrainResult {
  MPS mps;
  std::vector<double> energy_trace;  // start + one entry per completed sweep
};

/// Gradient pre-training: each sweep moves the orthogonality center
/// 0 -> N-1 -> 0 and at every visited site takes one steepest-descent step
/// A <- A - lr * dE/dA* on the center tensor, then renormalises it.
/// Throws NumericalError if the energy climbs 10 Hartree above its start.
PretrainResult pretrain(const MPS& m, const Hamiltonian& h, const SweepConfig& cfg);

struct ExtractOptions {
  std::size_t layers = 1;
  std::size_t max_restarts = 200;
  double target_fidelity = 0.999;
  std::size_t max_coordinate_sweeps = 200;
  std::uint64_t seed = 0;
};

struct Extraction {
  std::vector<double> theta;            // build_ansatz(N, layers) order
  std::vector<double> block_fidelities;  // last layer, circuit order
};

/// Maps a bond-dimension <= 2 MPS onto the staircase ansatz applied to the
/// reference basis state `reference_bits`. Each block of the last layer is
/// fitted to the two-qubit unitary that sequentially prepares the
/// left-canonical MPS; earlier layers are set to leave the reference state
/// unchanged.
Extraction extract_circuit_params(const MPS& m, std::string_view reference_bits,
                                  const ExtractOptions& options = {});

/// Single-CNOT block unitary for 12 angles (ansatz order) on a qubit pair,
/// lower qubit as the most significant index bit.
Eigen::Matrix4cd block_unitary(std::span<const double> angles);

/// Block parameters that map |b0 b1> to itself up to a phase.
std::array<double, 12> reference_preserving_block(char control_bit);

void save_checkpoint(const MPS& m, const std::filesystem::path& path);
MPS load_checkpoint(const std::filesystem::path& path);

}  // namespace mpsvqe::mps
