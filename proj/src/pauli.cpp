#include "mpsvqe/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mpsvqe/errors.hpp"

namespace mpsvqe {

namespace {

void require_same_length(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits())
    throw ValidationError("Pauli strings differ in length: " + std::to_string(a.n_qubits()) +
                          " vs " + std::to_string(b.n_qubits()));
}

// Single-qubit product table: a*b = i^phase * result.
struct SingleProduct {
  int phase;
  Pauli result;
};

SingleProduct single_product(Pauli a, Pauli b) {
  if (a == Pauli::I) return {0, b};
  if (b == Pauli::I) return {0, a};
  if (a == b) return {0, Pauli::I};
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  // X=1, Y=2, Z=3; cyclic order XY=iZ, YZ=iX, ZX=iY.
  const int result = 6 - ia - ib;
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {cyclic ? 1 : 3, static_cast<Pauli>(result)};
}

Eigen::Matrix2cd single_matrix(Pauli p) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, C(0, -1), C(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

char to_char(Pauli p) {
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  return kLetters[static_cast<int>(p)];
}

PauliString::PauliString(std::size_t n_qubits) : ops_(n_qubits, Pauli::I) {}

PauliString::PauliString(std::vector<Pauli> ops) : ops_(std::move(ops)) {}

PauliString PauliString::parse(std::string_view letters) {
  if (letters.empty()) throw ValidationError("empty Pauli string");
  std::vector<Pauli> ops;
  ops.reserve(letters.size());
  for (std::size_t i = 0; i < letters.size(); ++i) {
    switch (letters[i]) {
      case 'I': ops.push_back(Pauli::I); break;
      case 'X': ops.push_back(Pauli::X); break;
      case 'Y': ops.push_back(Pauli::Y); break;
      case 'Z': ops.push_back(Pauli::Z); break;
      default:
        throw ValidationError("invalid Pauli letter '" + std::string(1, letters[i]) +
                              "' at position " + std::to_string(i) + " in \"" +
                              std::string(letters) + "\"");
    }
  }
  return PauliString(std::move(ops));
}

bool PauliString::is_identity() const {
  return std::all_of(ops_.begin(), ops_.end(), [](Pauli p) { return p == Pauli::I; });
}

std::size_t PauliString::weight() const {
  return static_cast<std::size_t>(
      std::count_if(ops_.begin(), ops_.end(), [](Pauli p) { return p != Pauli::I; }));
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(ops_.size());
  for (Pauli p : ops_) s.push_back(to_char(p));
  return s;
}

std::uint64_t PauliString::x_mask() const {
  std::uint64_t mask = 0;
  const std::size_t n = ops_.size();
  for (std::size_t q = 0; q < n; ++q)
    if (ops_[q] == Pauli::X || ops_[q] == Pauli::Y) mask |= std::uint64_t{1} << (n - 1 - q);
  return mask;
}

std::uint64_t PauliString::z_mask() const {
  std::uint64_t mask = 0;
  const std::size_t n = ops_.size();
  for (std::size_t q = 0; q < n; ++q)
    if (ops_[q] == Pauli::Z || ops_[q] == Pauli::Y) mask |= std::uint64_t{1} << (n - 1 - q);
  return mask;
}

std::size_t PauliString::y_count() const {
  return static_cast<std::size_t>(std::count(ops_.begin(), ops_.end(), Pauli::Y));
}

std::complex<double> Phase::value() const {
  static const std::complex<double> kPowers[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowers[((quarter_turns % 4) + 4) % 4];
}

PauliProduct multiply(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  PauliString out(a.n_qubits());
  int phase = 0;
  for (std::size_t q = 0; q < a.n_qubits(); ++q) {
    const auto [p, r] = single_product(a[q], b[q]);
    phase += p;
    out.set(q, r);
  }
  return {Phase{phase % 4}, std::move(out)};
}

bool commutes(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  std::size_t anti = 0;
  for (std::size_t q = 0; q < a.n_qubits(); ++q)
    if (a[q] != Pauli::I && b[q] != Pauli::I && a[q] != b[q]) ++anti;
  return anti % 2 == 0;
}

bool qubitwise_commutes(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  for (std::size_t q = 0; q < a.n_qubits(); ++q)
    if (a[q] != Pauli::I && b[q] != Pauli::I && a[q] != b[q]) return false;
  return true;
}

Eigen::MatrixXcd matrix_of(const PauliString& s) {
  if (s.n_qubits() > 10)
    throw SizeGuardError("matrix_of: " + std::to_string(s.n_qubits()) + " qubits exceeds limit 10");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (Pauli p : s.ops()) {
    const Eigen::Matrix2cd local = single_matrix(p);
    // Kronecker with the new qubit as least significant.
    Eigen::MatrixXcd kron(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        kron.block(2 * r, 2 * c, 2, 2) = m(r, c) * local;
    m = std::move(kron);
  }
  return m;
}

Hamiltonian::Hamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms,
                         std::optional<HamiltonianMetadata> metadata)
    : n_qubits_(n_qubits), metadata_(std::move(metadata)) {
  if (n_qubits == 0) throw ValidationError("Hamiltonian needs at least one qubit");
  std::map<PauliString, std::size_t> position;
  for (auto& term : terms) {
    if (term.string.n_qubits() != n_qubits)
      throw ValidationError("term " + term.string.str() + " has " +
                            std::to_string(term.string.n_qubits()) + " qubits, expected " +
                            std::to_string(n_qubits));
    if (!std::isfinite(term.coeff))
      throw ValidationError("non-finite coefficient on term " + term.string.str());
    auto [it, inserted] = position.try_emplace(term.string, terms_.size());
    if (inserted) {
      terms_.push_back(std::move(term));
    } else {
      terms_[it->second].coeff += term.coeff;
      ++merged_duplicates_;
    }
  }
  std::erase_if(terms_, [](const PauliTerm& t) { return std::abs(t.coeff) < kDropTolerance; });
}

Eigen::MatrixXcd Hamiltonian::dense() const {
  if (n_qubits_ > 10)
    throw SizeGuardError("Hamiltonian::dense: " + std::to_string(n_qubits_) +
                         " qubits exceeds limit 10");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms_) m += t.coeff * matrix_of(t.string);
  return m;
}

std::vector<MeasurementGroup> group_terms(const Hamiltonian& h) {
  const std::size_t n = h.n_qubits();
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(h.terms()[a].coeff) > std::abs(h.terms()[b].coeff);
  });

  // Per group, the non-identity letter fixed on each qubit so far (I = free).
  std::vector<std::vector<Pauli>> support;
  std::vector<MeasurementGroup> groups;
  for (std::size_t idx : order) {
    const PauliString& s = h.terms()[idx].string;
    bool placed = false;
    for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
      bool fits = true;
      for (std::size_t q = 0; q < n && fits; ++q)
        fits = s[q] == Pauli::I || support[g][q] == Pauli::I || support[g][q] == s[q];
      if (!fits) continue;
      for (std::size_t q = 0; q < n; ++q)
        if (s[q] != Pauli::I) support[g][q] = s[q];
      groups[g].member_indices.push_back(idx);
      placed = true;
    }
    if (!placed) {
      support.push_back(s.ops());
      groups.push_back({{idx}, {}});
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& basis = groups[g].basis_rotation;
    basis.resize(n, Basis::Z);
    for (std::size_t q = 0; q < n; ++q) {
      if (support[g][q] == Pauli::X) basis[q] = Basis::X;
      if (support[g][q] == Pauli::Y) basis[q] = Basis::Y;
    }
  }
  return groups;
}

bool is_valid_group(const Hamiltonian& h, const MeasurementGroup& g) {
  if (g.basis_rotation.size() != h.n_qubits() || g.member_indices.empty()) return false;
  for (std::size_t i : g.member_indices) {
    if (i >= h.size()) return false;
    const PauliString& s = h.terms()[i].string;
    for (std::size_t q = 0; q < h.n_qubits(); ++q) {
      const Pauli p = s[q];
      if (p == Pauli::I) continue;
      const Basis need = p == Pauli::X ? Basis::X : p == Pauli::Y ? Basis::Y : Basis::Z;
      if (g.basis_rotation[q] != need) return false;
    }
  }
  for (std::size_t a = 0; a < g.member_indices.size(); ++a)
    for (std::size_t b = a + 1; b < g.member_indices.size(); ++b)
      if (!qubitwise_commutes(h.terms()[g.member_indices[a]].string,
                              h.terms()[g.member_indices[b]].string))
        return false;
  return true;
}

}  // namespace mpsvqe
