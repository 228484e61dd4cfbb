#include "mpsvqe/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mpsvqe/errors.hpp"
#include "mpsvqe/hamio.hpp"

namespace mpsvqe::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& into, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

EstimatorMode parse_mode(const std::string& s) {
  if (s == "exact") return EstimatorMode::Exact;
  if (s == "sampled") return EstimatorMode::Sampled;
  throw ValidationError("estimator must be \"exact\" or \"sampled\", got \"" + s + "\"");
}

std::string mode_name(EstimatorMode m) { return m == EstimatorMode::Exact ? "exact" : "sampled"; }

FoldMode parse_fold(const std::string& s) {
  if (s == "per-gate") return FoldMode::PerGate;
  if (s == "global") return FoldMode::Global;
  throw ValidationError("fold must be \"per-gate\" or \"global\", got \"" + s + "\"");
}

// Energies in result files carry 10 significant digits.
json energy_value(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", e);
  return json::parse(buf);
}

json noise_json(const NoiseModel& n) {
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"p_depol_1q", n.p_depol_1q},   {"p_depol_2q", n.p_depol_2q},
          {"t1_us", finite_or_null(n.t1_us)}, {"t2_us", finite_or_null(n.t2_us)},
          {"t_gate_1q_ns", n.t_gate_1q_ns}, {"t_gate_2q_ns", n.t_gate_2q_ns},
          {"p_meas_flip", n.p_meas_flip}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

std::filesystem::path output_dir(const RunConfig& cfg, const std::string& command) {
  const std::string id = cfg.run_id.empty() ? command + "-seed" + std::to_string(cfg.seed) : cfg.run_id;
  const auto dir = cfg.out / id;
  std::filesystem::create_directories(dir);
  return dir;
}

void echo_config(const RunConfig& cfg, const std::filesystem::path& dir) {
  write_file(dir / "config.echo", to_json(cfg).dump(2) + "\n");
}

Hamiltonian load_hamiltonian(const RunConfig& cfg) { return hamio::load(cfg.hamiltonian, &std::cerr); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

int cmd_fci(const RunConfig& cfg) {
  const Hamiltonian h = load_hamiltonian(cfg);
  const double e = hamio::exact_ground_energy(h);
  const std::size_t groups = group_terms(h).size();
  std::printf("exact ground energy: %.10f Hartree\nterms: %zu\nmeasurement groups: %zu\n", e, h.size(), groups);
  const auto dir = output_dir(cfg, "fci");
  echo_config(cfg, dir);
  json r = {{"command", "fci"}, {"exact_energy", energy_value(e)}, {"n_terms", h.size()}, {"n_groups", groups}};
  write_file(dir / "result.json", r.dump(2) + "\n");
  return 0;
}

int cmd_metrics(const RunConfig& cfg) {
  const Hamiltonian h = load_hamiltonian(cfg);
  const ParamCircuit c = build_ansatz(h.n_qubits(), cfg.layers);
  json rows = json::array();
  std::printf("%-10s %8s %8s %8s\n", "scale", "total", "param", "2q");
  for (double s : cfg.zne.scales) {
    const FoldedCircuit f = fold(c, s, cfg.zne.fold_mode);
    const GateMetrics m = metrics(f.circuit);
    std::printf("%-10.4g %8zu %8zu %8zu\n", f.achieved_scale, m.total_gates, m.parameter_gates, m.two_qubit_gates);
    rows.push_back({{"scale", f.achieved_scale},
                    {"total_gates", m.total_gates},
                    {"parameter_gates", m.parameter_gates},
                    {"two_qubit_gates", m.two_qubit_gates}});
  }
  const auto dir = output_dir(cfg, "metrics");
  echo_config(cfg, dir);
  json r = {{"command", "metrics"}, {"n_qubits", c.n_qubits()}, {"layers", cfg.layers}, {"circuits", rows}};
  write_file(dir / "result.json", r.dump(2) + "\n");
  return 0;
}

int cmd_pretrain(const RunConfig& cfg) {
  const Hamiltonian h = load_hamiltonian(cfg);
  const std::string bits = hamio::hartree_fock_bits(h);
  const mps::MPS start = cfg.pretrain.perturbation > 0
                             ? mps::perturbed(mps::from_product_state(bits, cfg.pretrain.max_bond),
                                              cfg.pretrain.max_bond, cfg.pretrain.perturbation, cfg.seed)
                             : mps::from_product_state(bits, cfg.pretrain.max_bond);
  const mps::PretrainResult r = mps::pretrain(start, h, cfg.pretrain.sweep);
  const auto dir = output_dir(cfg, "pretrain");
  echo_config(cfg, dir);
  mps::save_checkpoint(r.mps, dir / "mps.json");
  std::ostringstream trace;
  trace << "sweep,energy_hartree\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.10g\n", i, r.energy_trace[i]);
    trace << buf;
  }
  write_file(dir / "trace.csv", trace.str());
  const double e = r.energy_trace.back();
  json out = {{"command", "pretrain"},
              {"final_energy", energy_value(e)},
              {"sweeps", r.energy_trace.size() - 1},
              {"bond_dimension", r.mps.bond_dimension()},
              {"checkpoint", "mps.json"}};
  if (h.metadata() && h.metadata()->hf_energy) out["hf_energy"] = energy_value(*h.metadata()->hf_energy);
  write_file(dir / "result.json", out.dump(2) + "\n");
  std::printf("pre-trained MPS energy: %.10f Hartree after %zu sweep(s)\n", e, r.energy_trace.size() - 1);
  return 0;
}

json outcome_json(const TrainOutcome& o) {
  return {{"initial_energy", energy_value(o.initial_energy)},
          {"final_energy", energy_value(o.result.best_energy)},
          {"iterations", o.result.trace.records.size()},
          {"theta", o.result.theta}};
}

int cmd_train(const RunConfig& cfg, std::size_t repeat) {
  const Hamiltonian h = load_hamiltonian(cfg);
  const auto dir = output_dir(cfg, "train");
  echo_config(cfg, dir);
  json result = {{"command", "train"}, {"pretrain", cfg.pretrain.enable}};
  if (h.metadata() && h.metadata()->fci_energy) result["fci_energy"] = energy_value(*h.metadata()->fci_energy);

  if (repeat <= 1) {
    const TrainOutcome o = run_training(cfg, h, cfg.seed, cfg.pretrain.enable);
    std::ostringstream trace;
    o.result.trace.write_csv(trace);
    write_file(dir / "trace.csv", trace.str());
    result["run"] = outcome_json(o);
    write_file(dir / "result.json", result.dump(2) + "\n");
    std::printf("final energy: %.10f Hartree (%zu iterations)\n", o.result.best_energy,
                o.result.trace.records.size());
    return 0;
  }

  // Both arms share the per-run seeds so that only the initialisation differs.
  std::ostringstream hist;
  hist << "arm,run,final_energy_hartree\n";
  json arms = json::object();
  for (bool pre : {true, false}) {
    const std::string arm = pre ? "pretrained" : "random";
    const auto runs = run_batch(cfg, h, cfg.seed, repeat, pre);
    std::vector<double> finals;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      finals.push_back(runs[i].result.best_energy);
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s,%zu,%.10g\n", arm.c_str(), i, finals.back());
      hist << buf;
    }
    arms[arm] = {{"best", energy_value(*std::min_element(finals.begin(), finals.end()))},
                 {"median", energy_value(median(finals))},
                 {"variance", sample_variance(finals)}};
    std::printf("%-10s best %.10f median %.10f variance %.3e\n", arm.c_str(),
                *std::min_element(finals.begin(), finals.end()), median(finals), sample_variance(finals));
  }
  write_file(dir / "histograms.csv", hist.str());
  result["arms"] = arms;
  result["repeat"] = repeat;
  write_file(dir / "result.json", result.dump(2) + "\n");
  return 0;
}

int cmd_mitigate(const RunConfig& cfg) {
  const Hamiltonian h = load_hamiltonian(cfg);
  const auto dir = output_dir(cfg, "mitigate");
  echo_config(cfg, dir);
  const TrainOutcome o = run_training(cfg, h, cfg.seed, cfg.pretrain.enable);
  std::ostringstream trace;
  o.result.trace.write_csv(trace);
  write_file(dir / "trace.csv", trace.str());

  const NoiseModel noise = cfg.noise_enabled ? cfg.noise : NoiseModel::none();
  const ParamCircuit c = pipeline_circuit(cfg, h);
  zne::ZneConfig zc = cfg.zne;
  zc.seed = derive_seed(cfg.seed, 0x5a5a);
  const auto [e_zne, diag] = zne::mitigated_energy(c, o.result.theta, h, noise, zc);
  const double e_noiseless = o.result.best_energy;
  const double e_raw = diag.points.front().mean();

  json points = json::array();
  for (const auto& p : diag.points) {
    json est = json::array();
    for (double e : p.estimates) est.push_back(energy_value(e));
    points.push_back({{"lambda", p.lambda}, {"mean", energy_value(p.mean())}, {"estimates", est}});
  }
  json z = {{"points", points},
            {"model", zne::to_string(diag.model.kind)},
            {"params", diag.model.params},
            {"fit_residual", diag.model.fit_residual},
            {"linear_residual", diag.linear_residual},
            {"fell_back_to_linear", diag.model.fell_back_to_linear},
            {"extrapolated", energy_value(e_zne)}};
  write_file(dir / "zne.json", z.dump(2) + "\n");
  if (diag.interpolation_warning) std::cerr << "warning: MLP residual below 1e-12, the fit interpolates the data\n";
  if (diag.model.fell_back_to_linear) std::cerr << "warning: exponential fit failed, fell back to linear\n";

  json r = {{"command", "mitigate"},
            {"noiseless_energy", energy_value(e_noiseless)},
            {"unmitigated_energy", energy_value(e_raw)},
            {"mitigated_energy", energy_value(e_zne)}};
  if (h.metadata() && h.metadata()->fci_energy) {
    const double fci = *h.metadata()->fci_energy;
    r["fci_energy"] = energy_value(fci);
    r["mitigated_error"] = std::abs(e_zne - fci);
    r["unmitigated_error"] = std::abs(e_raw - fci);
  }
  write_file(dir / "result.json", r.dump(2) + "\n");
  std::printf("noiseless %.10f  unmitigated %.10f  mitigated %.10f Hartree\n", e_noiseless, e_raw, e_zne);
  return 0;
}

int cmd_group(const RunConfig& cfg) {
  const Hamiltonian h = load_hamiltonian(cfg);
  const auto groups = group_terms(h);
  json out = json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::string basis;
    for (Basis b : groups[g].basis_rotation) basis += b == Basis::X ? 'X' : b == Basis::Y ? 'Y' : 'Z';
    std::printf("group %zu basis %s:", g, basis.c_str());
    json members = json::array();
    for (std::size_t i : groups[g].member_indices) {
      std::printf(" %s", h.terms()[i].string.str().c_str());
      members.push_back(h.terms()[i].string.str());
    }
    std::printf("\n");
    out.push_back({{"basis", basis}, {"members", members}});
  }
  std::printf("%zu terms in %zu groups\n", h.size(), groups.size());
  const auto dir = output_dir(cfg, "group");
  echo_config(cfg, dir);
  write_file(dir / "result.json", json({{"command", "group"}, {"groups", out}}).dump(2) + "\n");
  return 0;
}

}  // namespace

NoiseModel parse_noise(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "paper") return NoiseModel::paper();
    if (s == "none") return NoiseModel::none();
    throw ValidationError("noise must be \"paper\", \"none\", or an object");
  }
  reject_unknown(j, {"p_depol_1q", "p_depol_2q", "t1_us", "t2_us", "t_gate_1q_ns", "t_gate_2q_ns", "p_meas_flip"},
                 "noise");
  NoiseModel n = NoiseModel::paper();
  const auto time = [&](const char* key, double& into) {
    if (j.contains(key) && j.at(key).is_null()) into = std::numeric_limits<double>::infinity();
    else read(j, key, into, "noise");
  };
  read(j, "p_depol_1q", n.p_depol_1q, "noise");
  read(j, "p_depol_2q", n.p_depol_2q, "noise");
  time("t1_us", n.t1_us);
  time("t2_us", n.t2_us);
  read(j, "t_gate_1q_ns", n.t_gate_1q_ns, "noise");
  read(j, "t_gate_2q_ns", n.t_gate_2q_ns, "noise");
  read(j, "p_meas_flip", n.p_meas_flip, "noise");
  n.validate();
  return n;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  reject_unknown(j, {"hamiltonian", "layers", "seed", "out", "run_id", "pretrain", "train", "noise", "zne"}, "config");
  if (j.contains("hamiltonian")) {
    std::filesystem::path p = j.at("hamiltonian").get<std::string>();
    if (p.is_relative() && !base_dir.empty() && !std::filesystem::exists(p) &&
        std::filesystem::exists(base_dir / p))
      p = base_dir / p;
    cfg.hamiltonian = p;
  }
  read(j, "layers", cfg.layers, "config");
  read(j, "seed", cfg.seed, "config");
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  read(j, "run_id", cfg.run_id, "config");

  if (j.contains("pretrain")) {
    const json& p = j.at("pretrain");
    reject_unknown(p, {"enable", "max_bond", "perturbation", "learning_rate", "sweeps", "tol", "extract_restarts",
                       "target_fidelity"},
                   "pretrain");
    read(p, "enable", cfg.pretrain.enable, "pretrain");
    read(p, "max_bond", cfg.pretrain.max_bond, "pretrain");
    read(p, "perturbation", cfg.pretrain.perturbation, "pretrain");
    read(p, "learning_rate", cfg.pretrain.sweep.learning_rate, "pretrain");
    read(p, "sweeps", cfg.pretrain.sweep.n_sweeps, "pretrain");
    read(p, "tol", cfg.pretrain.sweep.convergence_tol, "pretrain");
    read(p, "extract_restarts", cfg.pretrain.extract_restarts, "pretrain");
    read(p, "target_fidelity", cfg.pretrain.target_fidelity, "pretrain");
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t, {"learning_rate", "max_iters", "tol", "estimator", "shots", "noisy", "init_scale"}, "train");
    read(t, "learning_rate", cfg.train.config.learning_rate, "train");
    read(t, "max_iters", cfg.train.config.max_iters, "train");
    read(t, "tol", cfg.train.config.tol, "train");
    if (t.contains("estimator")) cfg.train.estimator = parse_mode(t.at("estimator").get<std::string>());
    read(t, "shots", cfg.train.shots, "train");
    read(t, "noisy", cfg.train.noisy, "train");
    read(t, "init_scale", cfg.train.init_scale, "train");
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    cfg.noise_enabled = !(n.is_string() && n.get<std::string>() == "none");
    cfg.noise = parse_noise(n);
  }
  if (j.contains("zne")) {
    const json& z = j.at("zne");
    reject_unknown(z, {"scales", "fold", "model", "degree", "repeats", "estimator", "shots", "mlp"}, "zne");
    read(z, "scales", cfg.zne.scales, "zne");
    if (z.contains("fold")) cfg.zne.fold_mode = parse_fold(z.at("fold").get<std::string>());
    if (z.contains("model")) cfg.zne.model = zne::parse_model_kind(z.at("model").get<std::string>());
    read(z, "degree", cfg.zne.degree, "zne");
    read(z, "repeats", cfg.zne.repeats, "zne");
    if (z.contains("estimator")) cfg.zne.estimator.mode = parse_mode(z.at("estimator").get<std::string>());
    read(z, "shots", cfg.zne.estimator.shots, "zne");
    if (z.contains("mlp")) {
      const json& m = z.at("mlp");
      reject_unknown(m, {"hidden", "activation", "epochs", "learning_rate", "restarts", "seed"}, "zne.mlp");
      if (m.contains("hidden")) {
        const auto w = m.at("hidden").get<std::vector<std::size_t>>();
        if (w.size() != 2) throw ValidationError("zne.mlp.hidden: expected two widths");
        cfg.zne.mlp.hidden1 = w[0];
        cfg.zne.mlp.hidden2 = w[1];
      }
      read(m, "activation", cfg.zne.mlp.activation, "zne.mlp");
      read(m, "epochs", cfg.zne.mlp.epochs, "zne.mlp");
      read(m, "learning_rate", cfg.zne.mlp.learning_rate, "zne.mlp");
      read(m, "restarts", cfg.zne.mlp.restarts, "zne.mlp");
      read(m, "seed", cfg.zne.mlp.seed, "zne.mlp");
    }
  }
  if (cfg.layers < 1) throw ValidationError("layers must be >= 1");
  cfg.train.config.validate();
  cfg.zne.mlp.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json mlp = {{"hidden", {cfg.zne.mlp.hidden1, cfg.zne.mlp.hidden2}}, {"activation", cfg.zne.mlp.activation},
              {"epochs", cfg.zne.mlp.epochs},  {"learning_rate", cfg.zne.mlp.learning_rate},
              {"restarts", cfg.zne.mlp.restarts}, {"seed", cfg.zne.mlp.seed}};
  return {
      {"hamiltonian", cfg.hamiltonian.string()},
      {"layers", cfg.layers},
      {"seed", cfg.seed},
      {"out", cfg.out.string()},
      {"run_id", cfg.run_id},
      {"pretrain",
       {{"enable", cfg.pretrain.enable},
        {"max_bond", cfg.pretrain.max_bond},
        {"perturbation", cfg.pretrain.perturbation},
        {"learning_rate", cfg.pretrain.sweep.learning_rate},
        {"sweeps", cfg.pretrain.sweep.n_sweeps},
        {"tol", cfg.pretrain.sweep.convergence_tol},
        {"extract_restarts", cfg.pretrain.extract_restarts},
        {"target_fidelity", cfg.pretrain.target_fidelity}}},
      {"train",
       {{"learning_rate", cfg.train.config.learning_rate},
        {"max_iters", cfg.train.config.max_iters},
        {"tol", cfg.train.config.tol},
        {"estimator", mode_name(cfg.train.estimator)},
        {"shots", cfg.train.shots},
        {"noisy", cfg.train.noisy},
        {"init_scale", cfg.train.init_scale}}},
      {"noise", cfg.noise_enabled ? noise_json(cfg.noise) : json("none")},
      {"zne",
       {{"scales", cfg.zne.scales},
        {"fold", cfg.zne.fold_mode == FoldMode::PerGate ? "per-gate" : "global"},
        {"model", zne::to_string(cfg.zne.model)},
        {"degree", cfg.zne.degree},
        {"repeats", cfg.zne.repeats},
        {"estimator", mode_name(cfg.zne.estimator.mode)},
        {"shots", cfg.zne.estimator.shots},
        {"mlp", mlp}}},
  };
}

ParamCircuit pipeline_circuit(const RunConfig& cfg, const Hamiltonian& h) {
  return prepend_reference_state(build_ansatz(h.n_qubits(), cfg.layers), hamio::hartree_fock_bits(h));
}

InitResult initial_parameters(const RunConfig& cfg, const Hamiltonian& h, std::uint64_t seed, bool pretrain) {
  InitResult init;
  const std::size_t n_params = build_ansatz(h.n_qubits(), cfg.layers).n_params();
  if (!pretrain) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::normal_distribution<double> g(0.0, cfg.train.init_scale);
    init.theta.resize(n_params);
    for (double& t : init.theta) t = g(rng);
    return init;
  }
  const std::string bits = hamio::hartree_fock_bits(h);
  mps::MPS start = mps::from_product_state(bits, cfg.pretrain.max_bond);
  if (cfg.pretrain.perturbation > 0)
    start = mps::perturbed(start, cfg.pretrain.max_bond, cfg.pretrain.perturbation, derive_seed(seed, 2));
  const mps::PretrainResult r = mps::pretrain(start, h, cfg.pretrain.sweep);
  mps::ExtractOptions opt;
  opt.layers = cfg.layers;
  opt.max_restarts = cfg.pretrain.extract_restarts;
  opt.target_fidelity = cfg.pretrain.target_fidelity;
  opt.seed = derive_seed(seed, 3);
  const mps::Extraction ex = mps::extract_circuit_params(r.mps, bits, opt);
  init.theta = ex.theta;
  init.pretrain_trace = r.energy_trace;
  init.block_fidelities = ex.block_fidelities;
  return init;
}

TrainOutcome run_training(const RunConfig& cfg, const Hamiltonian& h, std::uint64_t seed, bool pretrain) {
  TrainOutcome o;
  o.init = initial_parameters(cfg, h, seed, pretrain);
  EnergyEstimator est;
  est.mode = cfg.train.estimator;
  est.shots = cfg.train.shots;
  if (cfg.train.noisy && cfg.noise_enabled) est.noise = cfg.noise;
  const Objective obj(pipeline_circuit(cfg, h), h, est);
  TrainConfig tc = cfg.train.config;
  tc.seed = derive_seed(seed, 4);
  o.initial_energy = obj.energy(o.init.theta, tc.seed);
  o.result = train(obj, o.init.theta, tc);
  return o;
}

std::vector<TrainOutcome> run_batch(const RunConfig& cfg, const Hamiltonian& h, std::uint64_t seed,
                                    std::size_t count, bool pretrain) {
  std::vector<TrainOutcome> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        out[i] = run_training(cfg, h, derive_seed(seed, 1000 + i), pretrain);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Noise-aware VQE toolkit with MPS pre-training and zero-noise extrapolation"};
  app.require_subcommand(1);
  std::string config_path, out_dir, noise_arg;
  std::optional<std::uint64_t> seed;
  std::size_t repeat = 1;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--repeat", repeat, "Seeds per arm for `train`")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output root directory");
  app.add_option("--noise", noise_arg, "none | paper | <noise JSON path>");
  for (const char* name : {"fci", "metrics", "pretrain", "train", "mitigate", "group"}) app.add_subcommand(name);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (noise_arg == "none" || noise_arg == "paper") {
      cfg.noise_enabled = noise_arg == "paper";
      cfg.noise = noise_arg == "paper" ? NoiseModel::paper() : NoiseModel::none();
    } else if (!noise_arg.empty()) {
      std::ifstream in(noise_arg);
      if (!in) throw ValidationError("cannot open noise file " + noise_arg);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ValidationError("noise file " + noise_arg + ": " + e.what());
      }
      cfg.noise = parse_noise(j);
      cfg.noise_enabled = true;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "fci") return cmd_fci(cfg);
    if (cmd == "metrics") return cmd_metrics(cfg);
    if (cmd == "pretrain") return cmd_pretrain(cfg);
    if (cmd == "train") return cmd_train(cfg, repeat);
    if (cmd == "mitigate") return cmd_mitigate(cfg);
    if (cmd == "group") return cmd_group(cfg);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << '\n';
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mpsvqe::cli
