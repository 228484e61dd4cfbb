#include "mpsvqe/mps.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"
#include "mpsvqe/errors.hpp"

namespace mpsvqe::mps {

namespace {

using Mat = Eigen::MatrixXcd;

constexpr double kCanonicalTolerance = 1e-8;

// B_s = sum_s' sigma[s, s'] A_s'
LocalTensor apply_pauli(Pauli p, const LocalTensor& a) {
  LocalTensor b = a;
  switch (p) {
    case Pauli::I: break;
    case Pauli::X: std::swap(b.slice[0], b.slice[1]); break;
    case Pauli::Y:
      b.slice[0] = cplx(0, -1) * a.slice[1];
      b.slice[1] = cplx(0, 1) * a.slice[0];
      break;
    case Pauli::Z: b.slice[1] = -a.slice[1]; break;
  }
  return b;
}

// L' = sum_s A_s^dag L B_s
Mat transfer_left(const Mat& env, const LocalTensor& a, const LocalTensor& b) {
  return a.slice[0].adjoint() * env * b.slice[0] + a.slice[1].adjoint() * env * b.slice[1];
}

// R' = sum_s conj(A_s) R B_s^T
Mat transfer_right(const Mat& env, const LocalTensor& a, const LocalTensor& b) {
  return a.slice[0].conjugate() * env * b.slice[0].transpose() +
         a.slice[1].conjugate() * env * b.slice[1].transpose();
}

cplx overlap(const LocalTensor& a, const LocalTensor& b) {
  return (a.slice[0].adjoint() * b.slice[0]).trace() + (a.slice[1].adjoint() * b.slice[1]).trace();
}

Mat stacked_rows(const LocalTensor& a) {  // (2l x r)
  Mat m(2 * a.left(), a.right());
  m << a.slice[0], a.slice[1];
  return m;
}

Mat stacked_cols(const LocalTensor& a) {  // (l x 2r)
  Mat m(a.left(), 2 * a.right());
  m << a.slice[0], a.slice[1];
  return m;
}

// Left-isometric Q into site n, R absorbed into site n+1.
void shift_center_right(std::vector<LocalTensor>& t, std::size_t n) {
  const Mat m = stacked_rows(t[n]);
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Mat> qr(m);
  const Mat q = qr.householderQ() * Mat::Identity(m.rows(), k);
  const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::Index l = t[n].left();
  t[n].slice[0] = q.topRows(l);
  t[n].slice[1] = q.bottomRows(l);
  t[n + 1].slice[0] = r * t[n + 1].slice[0];
  t[n + 1].slice[1] = r * t[n + 1].slice[1];
}

// Right-isometric Q^dag into site n, R^dag absorbed into site n-1.
void shift_center_left(std::vector<LocalTensor>& t, std::size_t n) {
  const Mat m = stacked_cols(t[n]);
  const Mat mh = m.adjoint();
  const Eigen::Index k = std::min(mh.rows(), mh.cols());
  Eigen::HouseholderQR<Mat> qr(mh);
  const Mat q = qr.householderQ() * Mat::Identity(mh.rows(), k);
  const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Mat qh = q.adjoint();  // k x 2r
  const Eigen::Index rr = t[n].right();
  t[n].slice[0] = qh.leftCols(rr);
  t[n].slice[1] = qh.rightCols(rr);
  const Mat rh = r.adjoint();
  t[n - 1].slice[0] = t[n - 1].slice[0] * rh;
  t[n - 1].slice[1] = t[n - 1].slice[1] * rh;
}

Eigen::Index natural_bond(std::size_t n_sites, std::size_t bond, std::size_t chi) {
  // Bond between site `bond-1` and `bond`.
  const std::size_t span = std::min(bond, n_sites - bond);
  const std::size_t cap = span >= 20 ? chi : std::min<std::size_t>(chi, std::size_t{1} << span);
  return static_cast<Eigen::Index>(cap);
}

struct TermView {
  double coeff;
  std::vector<Pauli> ops;
  std::size_t lo;  // first non-identity site
  std::size_t hi;  // last non-identity site
};

std::vector<TermView> term_views(const Hamiltonian& h, double* identity_coeff) {
  std::vector<TermView> out;
  *identity_coeff = 0.0;
  for (const auto& t : h.terms()) {
    const auto& ops = t.string.ops();
    std::size_t lo = ops.size(), hi = 0;
    for (std::size_t q = 0; q < ops.size(); ++q)
      if (ops[q] != Pauli::I) {
        lo = std::min(lo, q);
        hi = q;
      }
    if (lo == ops.size()) *identity_coeff += t.coeff;
    else out.push_back({t.coeff, ops, lo, hi});
  }
  return out;
}

// Per-term left/right environments around a moving orthogonality center.
// left[t][k] covers sites 0..k-1 and right[t][k] covers sites k..N-1. Both are
// the identity outside a term's support because the sites there are
// isometries carrying identity operators.
class Environments {
 public:
  Environments(const std::vector<TermView>& terms, std::size_t n_sites)
      : terms_(terms), left_(terms.size(), std::vector<Mat>(n_sites + 1)),
        right_(terms.size(), std::vector<Mat>(n_sites + 1)), n_(n_sites) {
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      left_[t][0] = Mat::Identity(1, 1);
      right_[t][n_] = Mat::Identity(1, 1);
    }
  }

  void extend_left(const std::vector<LocalTensor>& a, std::size_t site) {
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      if (site + 1 <= terms_[t].lo) {
        left_[t][site + 1] = Mat::Identity(a[site].right(), a[site].right());
        continue;
      }
      left_[t][site + 1] =
          transfer_left(left_[t][site], a[site], apply_pauli(terms_[t].ops[site], a[site]));
    }
  }

  void extend_right(const std::vector<LocalTensor>& a, std::size_t site) {
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      if (site > terms_[t].hi) {
        right_[t][site] = Mat::Identity(a[site].left(), a[site].left());
        continue;
      }
      right_[t][site] =
          transfer_right(right_[t][site + 1], a[site], apply_pauli(terms_[t].ops[site], a[site]));
    }
  }

  // sum_t c_t L_t (sigma_t A) R_t^T, excluding the identity term.
  LocalTensor apply_effective(const LocalTensor& a, std::size_t site) const {
    LocalTensor out(a.left(), a.right());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      const LocalTensor b = apply_pauli(terms_[t].ops[site], a);
      const Mat& l = left_[t][site];
      const Mat rt = right_[t][site + 1].transpose();
      for (int s = 0; s < 2; ++s) out.slice[s] += terms_[t].coeff * (l * b.slice[s] * rt);
    }
    return out;
  }

 private:
  const std::vector<TermView>& terms_;
  std::vector<std::vector<Mat>> left_, right_;
  std::size_t n_;
};

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

cplx complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

// Columns of v not listed in `fixed` are replaced by an orthonormal
// completion built from e_0, e_1, ... in order.
Eigen::Matrix4cd complete_unitary(const std::vector<Eigen::Vector4cd>& columns,
                                  const std::vector<int>& fixed) {
  Eigen::Matrix4cd v = Eigen::Matrix4cd::Zero();
  std::vector<Eigen::Vector4cd> basis;
  for (std::size_t j = 0; j < fixed.size(); ++j) {
    v.col(fixed[j]) = columns[j];
    basis.push_back(columns[j]);
  }
  int next = 0;
  for (int col = 0; col < 4; ++col) {
    if (std::find(fixed.begin(), fixed.end(), col) != fixed.end()) continue;
    while (next < 4) {
      Eigen::Vector4cd e = Eigen::Vector4cd::Unit(next++);
      for (const auto& b : basis) e -= b * b.dot(e);
      if (e.norm() > 1e-8) {
        e.normalize();
        v.col(col) = e;
        basis.push_back(e);
        break;
      }
    }
  }
  return v;
}

struct BlockFit {
  std::array<double, 12> angles{};
  double fidelity = 0.0;
};

double block_fidelity_sq(const Eigen::Matrix4cd& v, const std::vector<int>& cols,
                         const std::array<double, 12>& angles) {
  const Eigen::Matrix4cd u = block_unitary(angles);
  cplx acc = 0.0;
  for (int c : cols) acc += v.col(c).dot(u.col(c));
  const double r = static_cast<double>(cols.size());
  return std::norm(acc) / (r * r);
}

// Rotosolve-style coordinate ascent: |tr|^2 is A + B cos(x) + C sin(x) in
// each angle, so three evaluations give the exact coordinate optimum.
BlockFit fit_block(const Eigen::Matrix4cd& v, const std::vector<int>& cols,
                   const ExtractOptions& opt, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 2 * std::numbers::pi);
  BlockFit best;
  const double target_sq = opt.target_fidelity * opt.target_fidelity;
  for (std::size_t restart = 0; restart < std::max<std::size_t>(1, opt.max_restarts); ++restart) {
    std::array<double, 12> ang{};
    if (restart > 0)
      for (double& a : ang) a = uni(rng);
    double f = block_fidelity_sq(v, cols, ang);
    for (std::size_t sweep = 0; sweep < opt.max_coordinate_sweeps; ++sweep) {
      const double before = f;
      for (std::size_t i = 0; i < ang.size(); ++i) {
        std::array<double, 3> samples{};
        const double base = ang[i];
        for (int k = 0; k < 3; ++k) {
          ang[i] = base + 2 * std::numbers::pi * k / 3.0;
          samples[k] = block_fidelity_sq(v, cols, ang);
        }
        double b = 0.0, c = 0.0;
        for (int k = 0; k < 3; ++k) {
          b += samples[k] * std::cos(2 * std::numbers::pi * k / 3.0);
          c += samples[k] * std::sin(2 * std::numbers::pi * k / 3.0);
        }
        ang[i] = std::remainder(base + std::atan2(c, b), 2 * std::numbers::pi);
        f = block_fidelity_sq(v, cols, ang);
      }
      if (f - before < 1e-14) break;
    }
    if (f > best.fidelity * best.fidelity) {
      best.angles = ang;
      best.fidelity = std::sqrt(f);
    }
    if (f >= target_sq) break;
  }
  return best;
}

}  // namespace

LocalTensor::LocalTensor(Eigen::Index left, Eigen::Index right)
    : slice{Mat::Zero(left, right), Mat::Zero(left, right)} {}

MPS::MPS(std::vector<LocalTensor> tensors, std::size_t max_bond, std::optional<std::size_t> center)
    : tensors_(std::move(tensors)), max_bond_(max_bond), center_(center) {
  if (tensors_.empty()) throw ValidationError("MPS needs at least one site");
  if (max_bond_ == 0) throw ValidationError("max_bond must be positive");
  if (tensors_.front().left() != 1 || tensors_.back().right() != 1)
    throw ValidationError("MPS boundary bonds must have dimension 1");
  for (std::size_t n = 0; n < tensors_.size(); ++n) {
    const auto& a = tensors_[n];
    if (a.slice[0].rows() != a.slice[1].rows() || a.slice[0].cols() != a.slice[1].cols())
      throw ValidationError("site " + std::to_string(n) + " slices differ in shape");
    if (a.left() < 1 || a.right() < 1) throw ValidationError("bond dimensions must be positive");
    if (n + 1 < tensors_.size() && a.right() != tensors_[n + 1].left())
      throw ValidationError("bond mismatch between sites " + std::to_string(n) + " and " +
                            std::to_string(n + 1));
  }
  if (center_ && *center_ >= tensors_.size()) throw ValidationError("center out of range");
}

std::size_t MPS::bond_dimension() const {
  Eigen::Index chi = 1;
  for (const auto& a : tensors_) chi = std::max(chi, a.right());
  return static_cast<std::size_t>(chi);
}

double MPS::norm() const {
  Mat env = Mat::Identity(1, 1);
  for (const auto& a : tensors_) env = transfer_left(env, a, a);
  return std::sqrt(std::abs(env(0, 0)));
}

MPS from_product_state(std::string_view bits, std::size_t max_bond) {
  if (bits.empty()) throw ValidationError("product state needs at least one bit");
  std::vector<LocalTensor> t;
  for (std::size_t n = 0; n < bits.size(); ++n) {
    if (bits[n] != '0' && bits[n] != '1')
      throw ValidationError("non-binary character at position " + std::to_string(n));
    LocalTensor a(1, 1);
    a.slice[bits[n] == '1' ? 1 : 0](0, 0) = 1.0;
    t.push_back(std::move(a));
  }
  return MPS(std::move(t), max_bond, 0);
}

MPS from_dense(const StateVector& psi, std::size_t max_bond) {
  const std::size_t n = psi.n_qubits();
  if (n > 12) throw SizeGuardError("from_dense supports at most 12 qubits");
  std::vector<LocalTensor> t;
  Mat rest = Eigen::Map<const Eigen::Matrix<cplx, 1, Eigen::Dynamic>>(psi.amplitudes().data(),
                                                                      static_cast<Eigen::Index>(psi.dim()));
  // `rest` has rows = current left bond, cols = remaining amplitudes.
  for (std::size_t site = 0; site + 1 < n; ++site) {
    const Eigen::Index left = rest.rows();
    const Eigen::Index remaining = rest.cols() / 2;
    // Rows ordered (s, l) to match stacked_rows.
    Mat m(2 * left, remaining);
    for (Eigen::Index l = 0; l < left; ++l)
      for (int s = 0; s < 2; ++s) m.row(s * left + l) = rest.block(l, s * remaining, 1, remaining);
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index keep =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(max_bond), svd.singularValues().size());
    const Mat u = svd.matrixU().leftCols(keep);
    LocalTensor a(left, keep);
    a.slice[0] = u.topRows(left);
    a.slice[1] = u.bottomRows(left);
    t.push_back(std::move(a));
    rest = svd.singularValues().head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
  }
  LocalTensor last(rest.rows(), 1);
  last.slice[0] = rest.col(0);
  last.slice[1] = rest.col(1);
  t.push_back(std::move(last));
  return MPS(std::move(t), max_bond, n - 1);
}

MPS random_mps(std::size_t n_sites, std::size_t chi, std::uint64_t seed) {
  if (n_sites == 0) throw ValidationError("MPS needs at least one site");
  auto rng = make_rng(seed);
  std::vector<LocalTensor> t;
  for (std::size_t n = 0; n < n_sites; ++n) {
    LocalTensor a(natural_bond(n_sites, n, chi), natural_bond(n_sites, n + 1, chi));
    for (auto& s : a.slice)
      for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = complex_normal(rng);
    t.push_back(std::move(a));
  }
  MPS m(std::move(t), chi);
  MPS c = canonicalize(m, 0);
  const double nrm = std::sqrt(c[0].squared_norm());
  c.tensor(0).slice[0] /= nrm;
  c.tensor(0).slice[1] /= nrm;
  return c;
}

MPS perturbed(const MPS& m, std::size_t chi, double amplitude, std::uint64_t seed) {
  auto rng = make_rng(seed);
  const std::size_t n_sites = m.size();
  std::vector<LocalTensor> t;
  for (std::size_t n = 0; n < n_sites; ++n) {
    const Eigen::Index l = std::max(m[n].left(), natural_bond(n_sites, n, chi));
    const Eigen::Index r = std::max(m[n].right(), natural_bond(n_sites, n + 1, chi));
    LocalTensor a(l, r);
    for (int s = 0; s < 2; ++s) {
      a.slice[s].topLeftCorner(m[n].left(), m[n].right()) = m[n].slice[s];
      for (Eigen::Index i = 0; i < a.slice[s].size(); ++i)
        a.slice[s].data()[i] += amplitude * complex_normal(rng);
    }
    t.push_back(std::move(a));
  }
  MPS c = canonicalize(MPS(std::move(t), std::max(chi, m.max_bond())), 0);
  const double nrm = std::sqrt(c[0].squared_norm());
  c.tensor(0).slice[0] /= nrm;
  c.tensor(0).slice[1] /= nrm;
  return c;
}

MPS canonicalize(const MPS& m, std::size_t center) {
  if (center >= m.size()) throw ValidationError("canonicalize: center out of range");
  std::vector<LocalTensor> t = m.tensors();
  for (std::size_t n = 0; n < center; ++n) shift_center_right(t, n);
  for (std::size_t n = t.size() - 1; n > center; --n) shift_center_left(t, n);
  return MPS(std::move(t), m.max_bond(), center);
}

double left_orthogonality_error(const LocalTensor& a) {
  const Mat g = a.slice[0].adjoint() * a.slice[0] + a.slice[1].adjoint() * a.slice[1];
  return (g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double right_orthogonality_error(const LocalTensor& a) {
  const Mat g = a.slice[0] * a.slice[0].adjoint() + a.slice[1] * a.slice[1].adjoint();
  return (g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double canonical_error(const MPS& m) {
  if (!m.center()) return std::numeric_limits<double>::infinity();
  double err = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (n < *m.center()) err = std::max(err, left_orthogonality_error(m[n]));
    if (n > *m.center()) err = std::max(err, right_orthogonality_error(m[n]));
  }
  return err;
}

StateVector dense(const MPS& m) {
  if (m.size() > 12) throw SizeGuardError("dense supports at most 12 sites");
  Mat v = Mat::Identity(1, 1);  // rows: prefix basis index, cols: bond
  for (const auto& a : m.tensors()) {
    Mat next(v.rows() * 2, a.right());
    for (Eigen::Index p = 0; p < v.rows(); ++p)
      for (int s = 0; s < 2; ++s) next.row(2 * p + s) = v.row(p) * a.slice[s];
    v = std::move(next);
  }
  std::vector<cplx> amps(static_cast<std::size_t>(v.rows()));
  for (Eigen::Index i = 0; i < v.rows(); ++i) amps[static_cast<std::size_t>(i)] = v(i, 0);
  return StateVector(m.size(), std::move(amps));
}

double energy(const MPS& m, const Hamiltonian& h) {
  if (h.n_qubits() != m.size()) throw ValidationError("MPS and Hamiltonian sizes differ");
  if (!m.center()) throw ValidationError("energy needs a canonical MPS (no center set)");
  const double err = canonical_error(m);
  if (err > kCanonicalTolerance)
    throw ValidationError("energy needs a canonical MPS (isometry error " + std::to_string(err) + ")");
  const std::size_t c = *m.center();
  const auto& a = m.tensors();
  const double norm_sq = a[c].squared_norm();

  double identity = 0.0;
  const auto terms = term_views(h, &identity);
  double acc = identity * norm_sq;
  for (const auto& term : terms) {
    // Everything left of min(lo, c) contracts to the identity, likewise right
    // of max(hi, c).
    const std::size_t start = std::min(term.lo, c);
    const std::size_t stop = std::max(term.hi, c);
    Mat left = Mat::Identity(a[start].left(), a[start].left());
    for (std::size_t n = start; n < c; ++n)
      left = transfer_left(left, a[n], apply_pauli(term.ops[n], a[n]));
    Mat right = Mat::Identity(a[stop].right(), a[stop].right());
    for (std::size_t n = stop; n > c; --n)
      right = transfer_right(right, a[n], apply_pauli(term.ops[n], a[n]));
    const LocalTensor b = apply_pauli(term.ops[c], a[c]);
    LocalTensor hb(a[c].left(), a[c].right());
    for (int s = 0; s < 2; ++s) hb.slice[s] = left * b.slice[s] * right.transpose();
    acc += term.coeff * overlap(a[c], hb).real();
  }
  return acc / norm_sq;
}

PretrainResult pretrain(const MPS& m, const Hamiltonian& h, const SweepConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (h.n_qubits() != m.size()) throw ValidationError("MPS and Hamiltonian sizes differ");
  if (std::abs(m.norm() - 1.0) > 1e-8) throw ValidationError("pretrain needs a normalised MPS");

  MPS state = canonicalize(m, 0);
  PretrainResult result{m, {energy(state, h)}};
  if (cfg.n_sweeps == 0) return result;

  double identity = 0.0;
  const auto terms = term_views(h, &identity);
  const std::size_t n = state.size();
  std::vector<LocalTensor> a = state.tensors();
  Environments env(terms, n);
  for (std::size_t site = n; site-- > 1;) env.extend_right(a, site);

  const double start_energy = result.energy_trace.front();
  // One steepest-descent step on the center tensor; returns the energy
  // before the step.
  const auto update = [&](std::size_t site) {
    LocalTensor& center = a[site];
    LocalTensor hc = env.apply_effective(center, site);
    for (int s = 0; s < 2; ++s) hc.slice[s] += identity * center.slice[s];
    const double nsq = center.squared_norm();
    const double e = overlap(center, hc).real() / nsq;
    for (int s = 0; s < 2; ++s)
      center.slice[s] -= cfg.learning_rate * 2.0 * (hc.slice[s] - e * center.slice[s]) / nsq;
    const double nrm = std::sqrt(center.squared_norm());
    if (!std::isfinite(nrm) || nrm == 0.0) throw NumericalError("pretrain: center tensor degenerated");
    center.slice[0] /= nrm;
    center.slice[1] /= nrm;
    return e;
  };
  const auto center_energy = [&](std::size_t site) {
    LocalTensor hc = env.apply_effective(a[site], site);
    for (int s = 0; s < 2; ++s) hc.slice[s] += identity * a[site].slice[s];
    return overlap(a[site], hc).real() / a[site].squared_norm();
  };

  for (std::size_t sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
    for (std::size_t site = 0; site < n; ++site) {
      update(site);
      if (site + 1 < n) {
        shift_center_right(a, site);
        env.extend_left(a, site);
      }
    }
    for (std::size_t site = n; site-- > 0;) {
      update(site);
      if (site > 0) {
        shift_center_left(a, site);
        env.extend_right(a, site);
      }
    }
    const double e = center_energy(0);
    if (!std::isfinite(e)) throw NumericalError("pretrain: non-finite energy");
    if (e > start_energy + 10.0)
      throw NumericalError("pretrain diverged: energy " + std::to_string(e) + " vs start " +
                           std::to_string(start_energy));
    const double previous = result.energy_trace.back();
    result.energy_trace.push_back(e);
    if (std::abs(e - previous) < cfg.convergence_tol) break;
  }
  result.mps = MPS(std::move(a), m.max_bond(), 0);
  return result;
}

Eigen::Matrix4cd block_unitary(std::span<const double> g) {
  if (g.size() != 12) throw ValidationError("block_unitary needs 12 angles");
  const auto u3 = [&](std::size_t o) -> Eigen::Matrix2cd {
    return gates::rz(g[o + 2]) * gates::ry(g[o + 1]) * gates::rz(g[o]);
  };
  const auto kron2 = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd k;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) k.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
    return k;
  };
  return kron2(u3(6), u3(9)) * gates::cnot() * kron2(u3(0), u3(3));
}

std::array<double, 12> reference_preserving_block(char control_bit) {
  std::array<double, 12> g{};
  if (control_bit == '1') {
    // RY(pi) parks the control in |0>, the CNOT idles, RY(pi) restores it.
    g[1] = std::numbers::pi;
    g[7] = std::numbers::pi;
  }
  return g;
}

Extraction extract_circuit_params(const MPS& m, std::string_view bits, const ExtractOptions& opt) {
  const std::size_t n = m.size();
  if (n < 2) throw ValidationError("extraction needs at least two sites");
  if (bits.size() != n) throw ValidationError("reference bitstring length differs from MPS size");
  for (char b : bits)
    if (b != '0' && b != '1') throw ValidationError("reference bitstring must be binary");
  if (m.bond_dimension() > 2)
    throw ValidationError("extraction supports bond dimension <= 2, got " +
                          std::to_string(m.bond_dimension()));
  if (opt.layers == 0) throw ValidationError("extraction needs at least one layer");

  // Left-canonical with the norm on the last site: the staircase prepares
  // site N-1 first and hands each bond index down to the next block.
  MPS c = canonicalize(m, n - 1);
  const double nrm = std::sqrt(c[n - 1].squared_norm());
  c.tensor(n - 1).slice[0] /= nrm;
  c.tensor(n - 1).slice[1] /= nrm;
  const auto& a = c.tensors();
  const auto bit = [&](std::size_t q) { return bits[q] == '1' ? 1 : 0; };

  Extraction out;
  const std::size_t blocks_per_layer = n - 1;
  out.theta.reserve(opt.layers * blocks_per_layer * 12);
  for (std::size_t layer = 0; layer + 1 < opt.layers; ++layer)
    for (std::size_t b = 0; b < blocks_per_layer; ++b) {
      const std::size_t pair = n - 2 - b;
      const auto g = reference_preserving_block(bits[pair]);
      out.theta.insert(out.theta.end(), g.begin(), g.end());
    }

  auto rng = make_rng(opt.seed);
  for (std::size_t b = 0; b < blocks_per_layer; ++b) {
    const std::size_t k = n - 1 - b;  // block acts on (k-1, k)
    std::vector<Eigen::Vector4cd> targets;
    std::vector<int> cols;
    // Output amplitude for |x (qubit k-1), s (qubit k)> given incoming bond
    // value `alpha` on qubit k.
    const auto target_for = [&](Eigen::Index alpha) {
      Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
      for (int s = 0; s < 2; ++s) {
        if (k == 1) {
          for (int s0 = 0; s0 < 2; ++s0)
            v(2 * s0 + s) = (a[0].slice[s0] * a[1].slice[s])(0, alpha);
        } else {
          for (Eigen::Index x = 0; x < a[k].left(); ++x) v(2 * x + s) = a[k].slice[s](x, alpha);
        }
      }
      return v;
    };
    if (k == n - 1) {
      targets.push_back(target_for(0));
      cols.push_back(2 * bit(k - 1) + bit(k));
    } else {
      for (Eigen::Index alpha = 0; alpha < a[k].right(); ++alpha) {
        targets.push_back(target_for(alpha));
        cols.push_back(2 * bit(k - 1) + static_cast<int>(alpha));
      }
    }
    const Eigen::Matrix4cd v = complete_unitary(targets, cols);
    const BlockFit fit = fit_block(v, cols, opt, rng);
    out.theta.insert(out.theta.end(), fit.angles.begin(), fit.angles.end());
    out.block_fidelities.push_back(fit.fidelity);
  }
  return out;
}

void save_checkpoint(const MPS& m, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "mpsvqe.mps";
  doc["version"] = 1;
  doc["max_bond"] = m.max_bond();
  doc["center"] = m.center() ? nlohmann::json(*m.center()) : nlohmann::json(nullptr);
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& a : m.tensors()) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index l = 0; l < a.left(); ++l)
      for (int s = 0; s < 2; ++s)
        for (Eigen::Index r = 0; r < a.right(); ++r) {
          re.push_back(a.slice[s](l, r).real());
          im.push_back(a.slice[s](l, r).imag());
        }
    tensors.push_back({{"shape", {a.left(), 2, a.right()}}, {"re", re}, {"im", im}});
  }
  doc["tensors"] = std::move(tensors);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out << doc.dump(1) << '\n';
}

MPS load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint " + path.string() + ": " + e.what());
  }
  if (doc.value("format", "") != "mpsvqe.mps" || doc.value("version", 0) != 1)
    throw ValidationError("checkpoint " + path.string() + ": unsupported format or version");
  try {
    std::vector<LocalTensor> t;
    for (const auto& jt : doc.at("tensors")) {
      const auto shape = jt.at("shape").get<std::vector<Eigen::Index>>();
      if (shape.size() != 3 || shape[1] != 2) throw ValidationError("bad tensor shape");
      const auto re = jt.at("re").get<std::vector<double>>();
      const auto im = jt.at("im").get<std::vector<double>>();
      if (re.size() != static_cast<std::size_t>(shape[0] * 2 * shape[2]) || im.size() != re.size())
        throw ValidationError("tensor entry count does not match its shape");
      LocalTensor a(shape[0], shape[2]);
      std::size_t i = 0;
      for (Eigen::Index l = 0; l < shape[0]; ++l)
        for (int s = 0; s < 2; ++s)
          for (Eigen::Index r = 0; r < shape[2]; ++r, ++i) a.slice[s](l, r) = cplx(re[i], im[i]);
      t.push_back(std::move(a));
    }
    std::optional<std::size_t> center;
    if (!doc.at("center").is_null()) center = doc.at("center").get<std::size_t>();
    return MPS(std::move(t), doc.at("max_bond").get<std::size_t>(), center);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace mpsvqe::mps
