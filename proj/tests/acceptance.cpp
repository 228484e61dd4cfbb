// Acceptance checks. Run with a criterion name to evaluate one criterion, or
// without arguments to evaluate all of them. Each prints one PASS/FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "mpsvqe/cli.hpp"
#include "mpsvqe/hamio.hpp"
#include "mpsvqe/mps.hpp"
#include "mpsvqe/vqe.hpp"
#include "mpsvqe/zne.hpp"

using namespace mpsvqe;

namespace {

constexpr double kFci = -2.1664;
const std::string kH4 = std::string(MPSVQE_DATA_DIR) + "/h4_sto3g.json";

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

cli::RunConfig pipeline_config() {
  cli::RunConfig cfg;
  cfg.hamiltonian = kH4;
  cfg.layers = 1;
  cfg.train.config.max_iters = 2000;
  return cfg;
}

Outcome gate_metrics() {
  const auto t0 = std::chrono::steady_clock::now();
  const GateMetrics m = metrics(build_ansatz(8, 1));
  const double s = seconds_since(t0);
  const bool ok = m.total_gates == 91 && m.parameter_gates == 84 && m.two_qubit_gates == 7 && s < 1.0;
  return {ok, std::to_string(m.total_gates) + "/" + std::to_string(m.parameter_gates) + "/" +
                  std::to_string(m.two_qubit_gates) + " gates in " + fmt("%.3f s", s)};
}

Outcome fci_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e = hamio::exact_ground_energy(hamio::load(kH4));
  const double s = seconds_since(t0);
  return {std::abs(e - kFci) <= 5e-4 && s < 1.0, fmt("E = %.10f Ha", e) + fmt(" in %.3f s", s)};
}

Outcome noiseless_vqe() {
  const auto h = hamio::load(kH4);
  const cli::RunConfig cfg = pipeline_config();
  const auto runs = cli::run_batch(cfg, h, 0, 10, true);
  double best = 0.0;
  std::size_t max_iters = 0;
  for (const auto& r : runs) {
    best = std::min(best, r.result.best_energy);
    max_iters = std::max(max_iters, r.result.trace.records.size());
  }
  return {best <= -2.14 && max_iters <= 2000,
          fmt("best of 10 = %.10f Ha", best) + ", longest run " + std::to_string(max_iters) + " iterations"};
}

Outcome noise_mitigation() {
  const auto h = hamio::load(kH4);
  cli::RunConfig cfg = pipeline_config();
  const auto trained = cli::run_training(cfg, h, 0, true);
  const ParamCircuit c = cli::pipeline_circuit(cfg, h);
  const auto [e_zne, diag] = zne::mitigated_energy(c, trained.result.theta, h, NoiseModel::paper(), cfg.zne);
  const double e_noiseless = trained.result.best_energy;
  const double e_raw = diag.points.front().mean();
  const bool band = std::abs(e_zne - kFci) <= 0.1;
  const bool improves = std::abs(e_zne - e_noiseless) < std::abs(e_raw - e_noiseless);
  std::string d = fmt("noiseless %.6f", e_noiseless) + fmt(", E(1) %.6f", e_raw) +
                  fmt(", E(3) %.6f", diag.points[1].mean()) + fmt(", E(5) %.6f", diag.points[2].mean()) +
                  fmt(", E_zne %.6f", e_zne) + fmt(", |E_zne-FCI| %.4f", std::abs(e_zne - kFci)) +
                  fmt(", |E(1)-FCI| %.4f", std::abs(e_raw - kFci));
  return {band && improves, d};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

Outcome pretrain_stability() {
  const auto h = hamio::load(kH4);
  const cli::RunConfig cfg = pipeline_config();
  std::vector<double> pre, rnd;
  for (const auto& r : cli::run_batch(cfg, h, 100, 20, true)) pre.push_back(r.result.best_energy);
  for (const auto& r : cli::run_batch(cfg, h, 100, 20, false)) rnd.push_back(r.result.best_energy);
  const double vp = variance(pre), vr = variance(rnd), mp = median(pre), mr = median(rnd);
  return {vp < vr && mp < mr, fmt("pre-trained var %.3e", vp) + fmt(" median %.6f", mp) +
                                  fmt("; random var %.3e", vr) + fmt(" median %.6f", mr)};
}

// Small randomized versions of the oracle comparisons.
Outcome oracle_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  const auto random_h = [&](std::size_t n, std::size_t terms) {
    std::vector<PauliTerm> t;
    for (std::size_t i = 0; i < terms; ++i) {
      std::string s;
      for (std::size_t q = 0; q < n; ++q) s += "IXYZ"[rng() % 4];
      t.push_back({g(rng), PauliString::parse(s)});
    }
    return Hamiltonian(n, std::move(t));
  };
  const auto random_theta = [&](std::size_t k) {
    std::vector<double> v(k);
    for (double& x : v) x = 2 * g(rng);
    return v;
  };

  double mps_err = 0, canon_err = 0, grad_err = 0, fold_err = 0, cptp_err = 0;
  bool groups_ok = true;
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto h = random_h(n, 20);
    const auto m = mps::canonicalize(mps::random_mps(n, 4, rng()), rng() % n);
    const auto psi = mps::dense(m);
    mps_err = std::max(mps_err, std::abs(mps::energy(m, h) - expectation(psi, h)));
    const auto moved = mps::dense(mps::canonicalize(m, rng() % n));
    const cplx ov = psi.inner(moved);
    for (std::size_t i = 0; i < psi.dim(); ++i)
      canon_err = std::max(canon_err, std::abs(psi[i] * ov / std::abs(ov) - moved[i]));

    std::vector<std::size_t> seen(h.size(), 0);
    for (const auto& grp : group_terms(h)) {
      groups_ok = groups_ok && is_valid_group(h, grp);
      for (std::size_t a : grp.member_indices) {
        ++seen[a];
        for (std::size_t b : grp.member_indices)
          groups_ok = groups_ok && qubitwise_commutes(h.terms()[a].string, h.terms()[b].string);
      }
    }
    groups_ok = groups_ok && std::all_of(seen.begin(), seen.end(), [](std::size_t s) { return s == 1; });
  }
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto h = random_h(n, 12);
    const auto c = build_ansatz(n, 1);
    const auto theta = random_theta(c.n_params());
    const Objective obj(c, h, {});
    const auto grad = obj.gradient(theta);
    for (std::size_t j = 0; j < theta.size(); ++j) {
      auto tp = theta, tm = theta;
      tp[j] += 1e-5;
      tm[j] -= 1e-5;
      grad_err = std::max(grad_err, std::abs(grad[j] - (obj.energy(tp) - obj.energy(tm)) / 2e-5));
    }
  }
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto c = build_ansatz(n, 1);
    const auto theta = random_theta(c.n_params());
    const std::size_t dim = std::size_t{1} << n;
    for (double s : {1.0, 3.0, 5.0})
      for (FoldMode mode : {FoldMode::PerGate, FoldMode::Global}) {
        const auto f = fold(c, s, mode).circuit;
        for (std::size_t col = 0; col < dim; ++col) {
          auto a = StateVector::basis(n, col), b = StateVector::basis(n, col);
          run(c, theta, a);
          run(f, theta, b);
          for (std::size_t r = 0; r < dim; ++r) fold_err = std::max(fold_err, std::abs(a[r] - b[r]));
        }
      }
  }
  const NoiseModel paper = NoiseModel::paper();
  for (const auto& ch : {depolarizing_channel(0.001, 1), depolarizing_channel(0.004, 2), amplitude_damping_channel(0.2),
                         phase_flip_channel(0.1), bitflip_channel(0.05), thermal_relaxation_channel(100, 50, 80),
                         paper.one_qubit_channel(), paper.two_qubit_channel()})
    cptp_err = std::max(cptp_err, ch.completeness_error());

  const double s = seconds_since(t0);
  const bool ok = mps_err <= 1e-9 && canon_err <= 1e-10 && grad_err <= 1e-6 && fold_err <= 1e-9 &&
                  cptp_err <= 1e-10 && groups_ok && s < 60;
  return {ok, fmt("mps %.1e", mps_err) + fmt(", canon %.1e", canon_err) + fmt(", grad %.1e", grad_err) +
                  fmt(", fold %.1e", fold_err) + fmt(", cptp %.1e", cptp_err) +
                  (groups_ok ? ", groups ok" : ", groups BAD") + fmt(", %.1f s", s)};
}

Outcome zne_synthetic() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<zne::ScalePoint> expo, flat;
  for (double l : {1.0, 2.0, 3.0, 5.0}) expo.push_back({l, {2 + 0.5 * std::exp(-0.7 * l)}});
  for (double l : {1.0, 3.0, 5.0}) flat.push_back({l, {-1.7}});
  const auto em = zne::fit(zne::ModelKind::Exponential, expo);
  const double a_err = std::abs(em.params[0] - 2.0);
  double const_err = 0.0;
  for (auto k : {zne::ModelKind::Linear, zne::ModelKind::Polynomial, zne::ModelKind::Exponential, zne::ModelKind::Mlp})
    const_err = std::max(const_err, std::abs(zne::extrapolate(zne::fit(k, flat, {}, 2)) + 1.7));

  const auto h = hamio::load(kH4);
  const auto c = prepend_reference_state(build_ansatz(8, 1), hamio::hartree_fock_bits(h));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 0.3);
  std::vector<double> theta(c.n_params());
  for (double& t : theta) t = g(rng);
  const double exact = energy(c, theta, h, {});
  zne::ZneConfig zc;
  zc.model = zne::ModelKind::Exponential;
  const double pipe_err = std::abs(zne::mitigated_energy(c, theta, h, NoiseModel::none(), zc).first - exact);
  const double s = seconds_since(t0);
  return {a_err <= 1e-3 && !em.fell_back_to_linear && const_err <= 1e-6 && pipe_err <= 1e-6,
          fmt("exp a error %.1e", a_err) + fmt(", constant error %.1e", const_err) +
              fmt(", zero-noise pipeline error %.1e", pipe_err) + fmt(", %.1f s", s)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"gate_metrics", gate_metrics},         {"fci_benchmark", fci_benchmark},
    {"noiseless_vqe", noiseless_vqe},       {"noise_mitigation", noise_mitigation},
    {"pretrain_stability", pretrain_stability}, {"oracle_suite", oracle_suite},
    {"zne_synthetic", zne_synthetic},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  int failures = 0, ran = 0;
  for (const auto& [name, check] : kCriteria) {
    if (!only.empty() && only != name) continue;
    ++ran;
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
