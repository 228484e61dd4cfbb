#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "mpsvqe/pauli.hpp"

namespace mpsvqe::hamio {

inline constexpr int kFormatVersion = 1;

/// Reads a Hamiltonian JSON file. Duplicate Pauli strings are merged and a
/// warning is written to `warnings` (if non-null). Throws ValidationError with
/// the offending field, line, or letter position.
Hamiltonian load(const std::filesystem::path& path, std::ostream* warnings = nullptr);
Hamiltonian parse(std::string_view text, std::ostream* warnings = nullptr);

/// Canonical text form: fixed key order, one term per line, coefficients with
/// 17 significant digits.
std::string serialize(const Hamiltonian& h);
void save(const Hamiltonian& h, const std::filesystem::path& path);

/// Smallest eigenvalue of the dense Hamiltonian (n_qubits <= 12).
double exact_ground_energy(const Hamiltonian& h);

/// Occupation bitstring of the Hartree-Fock reference: lowest n_electrons
/// spin orbitals under the ordering declared in the metadata.
std::string hartree_fock_bits(const Hamiltonian& h);

}  // namespace mpsvqe::hamio
