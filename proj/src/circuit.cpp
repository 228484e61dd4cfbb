#include "mpsvqe/circuit.hpp"

#include <cmath>
#include <sstream>

#include "mpsvqe/errors.hpp"

namespace mpsvqe {

std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::RZ: return "RZ";
    case GateKind::RY: return "RY";
    case GateKind::X: return "X";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

Eigen::MatrixXcd Gate::matrix(std::span<const double> theta, double angle_offset) const {
  switch (kind) {
    case GateKind::RZ: return gates::rz(angle(theta) + angle_offset);
    case GateKind::RY: return gates::ry(angle(theta) + angle_offset);
    case GateKind::X: return gates::x();
    case GateKind::CNOT: return gates::cnot();
  }
  return {};
}

ParamCircuit::ParamCircuit(std::size_t n_qubits, std::vector<Gate> gates, std::size_t n_params)
    : n_qubits_(n_qubits), gates_(std::move(gates)), n_params_(n_params) {
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    const std::string where = "gate " + std::to_string(i) + " (" + std::string(to_string(g.kind)) + ")";
    if (g.is_rotation() != g.param.has_value())
      throw ValidationError(where + ": rotations need exactly one parameter, others none");
    if (g.param && g.param->index >= n_params_)
      throw ValidationError(where + ": parameter index out of range");
    for (std::size_t q : g.qubits())
      if (q >= n_qubits_) throw ValidationError(where + ": qubit out of range");
    if (g.kind == GateKind::CNOT && g.targets[0] == g.targets[1])
      throw ValidationError(where + ": control equals target");
  }
}

bool ParamCircuit::all_params_used() const {
  std::vector<bool> used(n_params_, false);
  for (const Gate& g : gates_)
    if (g.param) used[g.param->index] = true;
  for (bool u : used)
    if (!u) return false;
  return true;
}

std::string ParamCircuit::dump() const {
  std::ostringstream out;
  for (const Gate& g : gates_) {
    out << to_string(g.kind);
    for (std::size_t q : g.qubits()) out << ' ' << q;
    if (g.param) out << ' ' << (g.param->scale < 0 ? "-p" : "p") << g.param->index;
    out << '\n';
  }
  return out.str();
}

GateMetrics metrics(const ParamCircuit& c) {
  GateMetrics m;
  m.n_qubits = c.n_qubits();
  m.total_gates = c.size();
  for (const Gate& g : c.gates()) {
    if (g.is_rotation()) ++m.parameter_gates;
    if (g.arity() == 2) ++m.two_qubit_gates;
  }
  return m;
}

ParamCircuit build_ansatz(std::size_t n_qubits, std::size_t layers) {
  if (n_qubits < 2) throw ValidationError("ansatz needs at least two qubits");
  if (layers < 1) throw ValidationError("ansatz needs at least one layer");
  std::vector<Gate> gates;
  std::size_t p = 0;
  const auto dress = [&](std::size_t q) {
    gates.push_back(Gate::rz(q, p++));
    gates.push_back(Gate::ry(q, p++));
    gates.push_back(Gate::rz(q, p++));
  };
  for (std::size_t layer = 0; layer < layers; ++layer) {
    for (std::size_t a = n_qubits - 1; a-- > 0;) {
      dress(a);
      dress(a + 1);
      gates.push_back(Gate::cnot(a, a + 1));
      dress(a);
      dress(a + 1);
    }
  }
  return ParamCircuit(n_qubits, std::move(gates), p);
}

ParamCircuit prepend_reference_state(const ParamCircuit& c, std::string_view bits) {
  if (bits.size() != c.n_qubits())
    throw ValidationError("reference bitstring has length " + std::to_string(bits.size()) +
                          ", circuit has " + std::to_string(c.n_qubits()) + " qubits");
  std::vector<Gate> gates;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') gates.push_back(Gate::x(q));
    else if (bits[q] != '0')
      throw ValidationError("reference bitstring has non-binary character at position " +
                            std::to_string(q));
  }
  gates.insert(gates.end(), c.gates().begin(), c.gates().end());
  return ParamCircuit(c.n_qubits(), std::move(gates), c.n_params());
}

Gate adjoint_of(const Gate& g) {
  Gate adj = g;
  if (adj.param) adj.param->scale = -adj.param->scale;
  return adj;
}

FoldedCircuit fold(const ParamCircuit& c, double scale, FoldMode mode) {
  if (!(scale >= 1.0)) throw ValidationError("fold scale must be >= 1");
  const std::size_t base = c.size();
  if (base == 0) return {c, 1.0};

  auto full = static_cast<std::size_t>(std::floor((scale - 1.0) / 2.0));
  const double residual = scale - static_cast<double>(2 * full + 1);
  auto partial = static_cast<std::size_t>(std::llround(residual * static_cast<double>(base) / 2.0));
  if (partial >= base) {
    ++full;
    partial = 0;
  }

  const auto& src = c.gates();
  std::vector<Gate> out;
  out.reserve(base * (2 * full + 1) + 2 * partial);
  if (mode == FoldMode::PerGate) {
    for (std::size_t i = 0; i < base; ++i) {
      const std::size_t reps = full + (i >= base - partial ? 1 : 0);
      out.push_back(src[i]);
      for (std::size_t r = 0; r < reps; ++r) {
        out.push_back(adjoint_of(src[i]));
        out.push_back(src[i]);
      }
    }
  } else {
    out.insert(out.end(), src.begin(), src.end());
    const auto append_round_trip = [&](std::size_t from) {
      for (std::size_t i = base; i-- > from;) out.push_back(adjoint_of(src[i]));
      out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(from), src.end());
    };
    for (std::size_t r = 0; r < full; ++r) append_round_trip(0);
    if (partial > 0) append_round_trip(base - partial);
  }
  const double achieved =
      static_cast<double>(base * (2 * full + 1) + 2 * partial) / static_cast<double>(base);
  return {ParamCircuit(c.n_qubits(), std::move(out), c.n_params()), achieved};
}

void apply(const Gate& g, std::span<const double> theta, StateVector& psi, double angle_offset) {
  const std::size_t n = psi.n_qubits();
  auto amps = psi.amplitudes();
  const std::size_t dim = amps.size();
  switch (g.kind) {
    case GateKind::RZ: {
      const std::size_t bit = std::size_t{1} << (n - 1 - g.targets[0]);
      const double a = g.angle(theta) + angle_offset;
      const cplx lo = std::polar(1.0, -a / 2), hi = std::polar(1.0, a / 2);
      for (std::size_t i = 0; i < dim; ++i) amps[i] *= (i & bit) ? hi : lo;
      return;
    }
    case GateKind::RY: {
      const std::size_t bit = std::size_t{1} << (n - 1 - g.targets[0]);
      const double a = g.angle(theta) + angle_offset;
      const double c = std::cos(a / 2), s = std::sin(a / 2);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const cplx a0 = amps[i], a1 = amps[i | bit];
        amps[i] = c * a0 - s * a1;
        amps[i | bit] = s * a0 + c * a1;
      }
      return;
    }
    case GateKind::X: {
      const std::size_t bit = std::size_t{1} << (n - 1 - g.targets[0]);
      for (std::size_t i = 0; i < dim; ++i)
        if (!(i & bit)) std::swap(amps[i], amps[i | bit]);
      return;
    }
    case GateKind::CNOT: {
      const std::size_t control = std::size_t{1} << (n - 1 - g.targets[0]);
      const std::size_t target = std::size_t{1} << (n - 1 - g.targets[1]);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & control) && !(i & target)) std::swap(amps[i], amps[i | target]);
      return;
    }
  }
}

void run(const ParamCircuit& c, std::span<const double> theta, StateVector& psi) {
  if (theta.size() != c.n_params())
    throw ValidationError("parameter vector has length " + std::to_string(theta.size()) +
                          ", circuit expects " + std::to_string(c.n_params()));
  if (psi.n_qubits() != c.n_qubits()) throw ValidationError("state and circuit qubit counts differ");
  for (const Gate& g : c.gates()) apply(g, theta, psi);
}

StateVector simulate(const ParamCircuit& c, std::span<const double> theta) {
  StateVector psi(c.n_qubits());
  run(c, theta, psi);
  return psi;
}

NoisyExecutor::NoisyExecutor(const NoiseModel& noise)
    : noise_(noise), noiseless_(noise.gates_noiseless()) {
  noise_.validate();
  if (!noiseless_) {
    one_qubit_superop_ = noise_.one_qubit_channel().superoperator();
    two_qubit_superop_ = noise_.two_qubit_channel().superoperator();
  }
}

void NoisyExecutor::apply(const Gate& g, std::span<const double> theta, DensityMatrix& rho,
                          double angle_offset) const {
  apply_gate(rho, g.matrix(theta, angle_offset), g.qubits());
  if (noiseless_) return;
  apply_superoperator(rho, g.arity() == 2 ? two_qubit_superop_ : one_qubit_superop_, g.qubits());
}

void NoisyExecutor::run(const ParamCircuit& c, std::span<const double> theta,
                        DensityMatrix& rho) const {
  if (theta.size() != c.n_params())
    throw ValidationError("parameter vector has length " + std::to_string(theta.size()) +
                          ", circuit expects " + std::to_string(c.n_params()));
  if (rho.n_qubits() != c.n_qubits()) throw ValidationError("state and circuit qubit counts differ");
  for (const Gate& g : c.gates()) apply(g, theta, rho);
}

DensityMatrix NoisyExecutor::simulate(const ParamCircuit& c, std::span<const double> theta) const {
  DensityMatrix rho(c.n_qubits());
  run(c, theta, rho);
  return rho;
}

}  // namespace mpsvqe
