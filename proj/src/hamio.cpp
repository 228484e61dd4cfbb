#include "mpsvqe/hamio.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "mpsvqe/errors.hpp"

namespace mpsvqe::hamio {

namespace {

using nlohmann::json;

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(where + ": value is not finite");
  return d;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return v.get<int>();
}

std::string text_field(const json& obj, const std::string& key, const std::string& fallback = "") {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ValidationError(key + ": expected a string");
  return obj.at(key).get<std::string>();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

Hamiltonian parse(std::string_view text, std::ostream* warnings) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("parse error at " + line_col(text, e.byte ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("top level must be an object");

  const int version = integer(field(doc, "format_version", "header"), "format_version");
  if (version != kFormatVersion)
    throw ValidationError("format_version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kFormatVersion) + ")");
  const int n_qubits = integer(field(doc, "n_qubits", "header"), "n_qubits");
  if (n_qubits < 1 || n_qubits > 63) throw ValidationError("n_qubits must be in [1, 63]");

  HamiltonianMetadata meta;
  meta.name = text_field(doc, "name");
  meta.basis = text_field(doc, "basis");
  meta.generator = text_field(doc, "generator");
  meta.ordering = text_field(doc, "ordering", "interleaved");
  if (meta.ordering != "interleaved" && meta.ordering != "blocked-alpha-beta")
    throw ValidationError("ordering: expected \"interleaved\" or \"blocked-alpha-beta\", got \"" +
                          meta.ordering + "\"");
  if (doc.contains("n_electrons")) {
    const int ne = integer(doc.at("n_electrons"), "n_electrons");
    if (ne < 0 || ne > n_qubits) throw ValidationError("n_electrons must be in [0, n_qubits]");
    meta.n_electrons = ne;
  }
  if (doc.contains("charge")) meta.charge = integer(doc.at("charge"), "charge");
  if (doc.contains("multiplicity")) meta.multiplicity = integer(doc.at("multiplicity"), "multiplicity");
  if (doc.contains("geometry")) {
    const json& geo = doc.at("geometry");
    if (!geo.is_array()) throw ValidationError("geometry: expected an array");
    for (std::size_t i = 0; i < geo.size(); ++i) {
      const std::string where = "geometry[" + std::to_string(i) + "]";
      Atom atom;
      const json& el = field(geo[i], "element", where);
      if (!el.is_string()) throw ValidationError(where + ".element: expected a string");
      atom.element = el.get<std::string>();
      const json& xyz = field(geo[i], "xyz", where);
      if (!xyz.is_array() || xyz.size() != 3) throw ValidationError(where + ".xyz: expected 3 numbers");
      atom.x = number(xyz[0], where + ".xyz[0]");
      atom.y = number(xyz[1], where + ".xyz[1]");
      atom.z = number(xyz[2], where + ".xyz[2]");
      meta.geometry.push_back(atom);
    }
  }
  if (doc.contains("reference") && !doc.at("reference").is_null()) {
    const json& ref = doc.at("reference");
    if (ref.contains("hf_energy")) meta.hf_energy = number(ref.at("hf_energy"), "reference.hf_energy");
    if (ref.contains("fci_energy")) meta.fci_energy = number(ref.at("fci_energy"), "reference.fci_energy");
  }

  const json& jterms = field(doc, "terms", "header");
  if (!jterms.is_array()) throw ValidationError("terms: expected an array");
  std::vector<PauliTerm> terms;
  terms.reserve(jterms.size());
  for (std::size_t i = 0; i < jterms.size(); ++i) {
    const std::string where = "terms[" + std::to_string(i) + "]";
    const json& p = field(jterms[i], "pauli", where);
    if (!p.is_string()) throw ValidationError(where + ".pauli: expected a string");
    const std::string letters = p.get<std::string>();
    if (letters.size() != static_cast<std::size_t>(n_qubits))
      throw ValidationError(where + ".pauli: length " + std::to_string(letters.size()) +
                            " differs from n_qubits " + std::to_string(n_qubits));
    PauliString s;
    try {
      s = PauliString::parse(letters);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ".pauli: " + e.what());
    }
    terms.push_back({number(field(jterms[i], "coeff", where), where + ".coeff"), std::move(s)});
  }
  Hamiltonian h(static_cast<std::size_t>(n_qubits), std::move(terms), std::move(meta));
  if (h.merged_duplicates() > 0 && warnings)
    *warnings << "warning: merged " << h.merged_duplicates() << " duplicate Pauli term(s)\n";
  return h;
}

Hamiltonian load(const std::filesystem::path& path, std::ostream* warnings) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open Hamiltonian file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str(), warnings);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize(const Hamiltonian& h) {
  const HamiltonianMetadata meta = h.metadata().value_or(HamiltonianMetadata{});
  const auto str = [](const std::string& s) { return json(s).dump(); };
  std::ostringstream out;
  out << "{\n";
  out << "  \"format_version\": " << kFormatVersion << ",\n";
  out << "  \"name\": " << str(meta.name) << ",\n";
  out << "  \"generator\": " << str(meta.generator) << ",\n";
  out << "  \"basis\": " << str(meta.basis) << ",\n";
  out << "  \"ordering\": " << str(meta.ordering.empty() ? "interleaved" : meta.ordering) << ",\n";
  out << "  \"charge\": " << meta.charge << ",\n";
  out << "  \"multiplicity\": " << meta.multiplicity << ",\n";
  out << "  \"n_qubits\": " << h.n_qubits() << ",\n";
  if (meta.n_electrons) out << "  \"n_electrons\": " << *meta.n_electrons << ",\n";
  out << "  \"geometry\": [";
  for (std::size_t i = 0; i < meta.geometry.size(); ++i) {
    const Atom& a = meta.geometry[i];
    out << (i ? ",\n" : "\n") << "    {\"element\": " << str(a.element) << ", \"xyz\": [" << fmt17(a.x)
        << ", " << fmt17(a.y) << ", " << fmt17(a.z) << "]}";
  }
  out << (meta.geometry.empty() ? "],\n" : "\n  ],\n");
  if (meta.hf_energy || meta.fci_energy) {
    out << "  \"reference\": {";
    if (meta.hf_energy) out << "\"hf_energy\": " << fmt17(*meta.hf_energy);
    if (meta.hf_energy && meta.fci_energy) out << ", ";
    if (meta.fci_energy) out << "\"fci_energy\": " << fmt17(*meta.fci_energy);
    out << "},\n";
  }
  out << "  \"terms\": [";
  for (std::size_t i = 0; i < h.terms().size(); ++i) {
    const PauliTerm& t = h.terms()[i];
    out << (i ? ",\n" : "\n") << "    {\"pauli\": \"" << t.string.str() << "\", \"coeff\": " << fmt17(t.coeff)
        << "}";
  }
  out << (h.terms().empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

void save(const Hamiltonian& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << serialize(h);
}

double exact_ground_energy(const Hamiltonian& h) {
  const std::size_t n = h.n_qubits();
  if (n > 12) throw SizeGuardError("exact_ground_energy supports at most 12 qubits, got " + std::to_string(n));
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const PauliTerm& t : h.terms()) {
    const std::uint64_t x = t.string.x_mask(), z = t.string.z_mask();
    const std::complex<double> base = t.coeff * Phase{static_cast<int>(t.string.y_count() % 4)}.value();
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c) {
      const double sign = (std::popcount(c & z) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(c ^ x), static_cast<Eigen::Index>(c)) += sign * base;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolve did not converge");
  return es.eigenvalues()(0);
}

std::string hartree_fock_bits(const Hamiltonian& h) {
  if (!h.metadata() || !h.metadata()->n_electrons)
    throw ValidationError("hartree_fock_bits needs n_electrons in the metadata");
  const auto& meta = *h.metadata();
  const std::size_t n = h.n_qubits();
  const auto ne = static_cast<std::size_t>(*meta.n_electrons);
  std::string bits(n, '0');
  if (meta.ordering == "blocked-alpha-beta") {
    const std::size_t half = n / 2;
    const std::size_t alpha = (ne + 1) / 2, beta = ne / 2;
    if (alpha > half || beta > n - half) throw ValidationError("too many electrons for the orbital count");
    for (std::size_t i = 0; i < alpha; ++i) bits[i] = '1';
    for (std::size_t i = 0; i < beta; ++i) bits[half + i] = '1';
  } else {
    for (std::size_t i = 0; i < ne; ++i) bits[i] = '1';
  }
  return bits;
}

}  // namespace mpsvqe::hamio
