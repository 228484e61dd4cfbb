#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mpsvqe {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);

/// Tensor product of single-qubit Paulis. Qubit 0 is the leftmost letter and
/// the most significant bit of a computational-basis index.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);  // identity
  explicit PauliString(std::vector<Pauli> ops);

  /// Parses a compact letter string such as "IXZY". Throws ValidationError
  /// naming the first offending position.
  static PauliString parse(std::string_view letters);

  std::size_t n_qubits() const { return ops_.size(); }
  Pauli operator[](std::size_t q) const { return ops_[q]; }
  const std::vector<Pauli>& ops() const { return ops_; }
  void set(std::size_t q, Pauli p) { ops_[q] = p; }

  bool is_identity() const;
  std::size_t weight() const;
  std::string str() const;

  // Bit masks over basis-state indices (qubit q <-> bit n-1-q). Valid for
  // n_qubits <= 63.
  std::uint64_t x_mask() const;  // X or Y
  std::uint64_t z_mask() const;  // Z or Y
  std::size_t y_count() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> ops_;
};

/// Powers of i: value() == i^quarter_turns.
struct Phase {
  int quarter_turns = 0;  // 0..3

  std::complex<double> value() const;
  Phase operator*(Phase other) const { return {(quarter_turns + other.quarter_turns) % 4}; }
  friend bool operator==(Phase, Phase) = default;
};

struct PauliProduct {
  Phase phase;
  PauliString string;
};

PauliProduct multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);
bool qubitwise_commutes(const PauliString& a, const PauliString& b);

/// Dense Kronecker product of the single-qubit matrices; n_qubits <= 10.
Eigen::MatrixXcd matrix_of(const PauliString& s);

struct PauliTerm {
  double coeff = 0.0;  // Hartree
  PauliString string;
};

struct Atom {
  std::string element;
  double x = 0, y = 0, z = 0;  // Angstrom
};

struct HamiltonianMetadata {
  std::string name;
  std::string basis;
  std::string ordering;  // "interleaved" | "blocked-alpha-beta"
  std::string generator;
  std::optional<int> n_electrons;
  int charge = 0;
  int multiplicity = 1;
  std::vector<Atom> geometry;
  std::optional<double> hf_energy;
  std::optional<double> fci_energy;
};

/// Weighted sum of Pauli strings. Construction merges duplicate strings by
/// adding coefficients and drops merged terms with |coeff| < 1e-12.
class Hamiltonian {
 public:
  static constexpr double kDropTolerance = 1e-12;

  Hamiltonian() = default;
  Hamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms,
              std::optional<HamiltonianMetadata> metadata = std::nullopt);

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::optional<HamiltonianMetadata>& metadata() const { return metadata_; }

  /// Number of input terms that were folded into an earlier identical string.
  std::size_t merged_duplicates() const { return merged_duplicates_; }

  Eigen::MatrixXcd dense() const;  // n_qubits <= 10

 private:
  std::size_t n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
  std::optional<HamiltonianMetadata> metadata_;
  std::size_t merged_duplicates_ = 0;
};

/// Per-qubit measurement basis for a group. Basis::Z also covers qubits the
/// group does not touch.
enum class Basis : std::uint8_t { Z = 0, X = 1, Y = 2 };

struct MeasurementGroup {
  std::vector<std::size_t> member_indices;
  std::vector<Basis> basis_rotation;  // one entry per qubit
};

/// Greedy qubit-wise-commuting colouring, largest |coeff| first. Deterministic
/// for a fixed term order.
std::vector<MeasurementGroup> group_terms(const Hamiltonian& h);

/// True when every member is compatible with the group's basis and all members
/// pairwise qubit-wise commute.
bool is_valid_group(const Hamiltonian& h, const MeasurementGroup& g);

}  // namespace mpsvqe
