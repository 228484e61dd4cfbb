#pragma once

#include <random>
#include <string>

#include "mpsvqe/circuit.hpp"
#include "mpsvqe/pauli.hpp"
#include "mpsvqe/sim.hpp"

namespace testing_util {

inline mpsvqe::StateVector random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<mpsvqe::cplx> a(std::size_t{1} << n);
  for (auto& x : a) x = {g(rng), g(rng)};
  mpsvqe::StateVector psi(n, std::move(a));
  psi.normalize();
  return psi;
}

inline mpsvqe::Hamiltonian random_hamiltonian(std::size_t n, std::size_t terms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, 3);
  std::normal_distribution<double> g;
  std::vector<mpsvqe::PauliTerm> t;
  for (std::size_t i = 0; i < terms; ++i) {
    std::string s;
    for (std::size_t q = 0; q < n; ++q) s += "IXYZ"[letter(rng)];
    t.push_back({g(rng), mpsvqe::PauliString::parse(s)});
  }
  return mpsvqe::Hamiltonian(n, std::move(t));
}

inline std::vector<double> random_angles(std::size_t n, std::uint64_t seed, double scale = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Dense unitary of a circuit built column by column.
inline Eigen::MatrixXcd circuit_unitary(const mpsvqe::ParamCircuit& c, std::span<const double> theta) {
  const std::size_t dim = std::size_t{1} << c.n_qubits();
  Eigen::MatrixXcd u(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    auto psi = mpsvqe::StateVector::basis(c.n_qubits(), col);
    mpsvqe::run(c, theta, psi);
    for (std::size_t r = 0; r < dim; ++r) u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = psi[r];
  }
  return u;
}

inline Eigen::VectorXcd to_eigen(const mpsvqe::StateVector& psi) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.dim()));
  for (std::size_t i = 0; i < psi.dim(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
  return v;
}

}  // namespace testing_util
