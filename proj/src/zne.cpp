#include "mpsvqe/zne.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpsvqe/errors.hpp"

namespace mpsvqe::zne {

namespace {

struct Samples {
  std::vector<double> x, y;
};

Samples flatten(std::span<const ScalePoint> data) {
  Samples s;
  for (const auto& p : data) {
    if (!(p.lambda >= 1.0)) throw ValidationError("scale factors must be >= 1");
    if (p.estimates.empty()) throw ValidationError("scale point without estimates");
    for (double e : p.estimates) {
      s.x.push_back(p.lambda);
      s.y.push_back(e);
    }
  }
  return s;
}

std::size_t distinct_scales(std::span<const ScalePoint> data) {
  std::vector<double> l;
  for (const auto& p : data) l.push_back(p.lambda);
  std::sort(l.begin(), l.end());
  return static_cast<std::size_t>(std::unique(l.begin(), l.end(),
                                              [](double a, double b) { return std::abs(a - b) < 1e-12; }) -
                                  l.begin());
}

double mean_sq_residual(const ExtrapolationModel& m, const Samples& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double r = m.evaluate(s.x[i]) - s.y[i];
    acc += r * r;
  }
  return acc / static_cast<double>(s.x.size());
}

ExtrapolationModel fit_polynomial(const Samples& s, int degree, ModelKind kind) {
  const auto n = static_cast<Eigen::Index>(s.x.size());
  Eigen::MatrixXd v(n, degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= s.x[i]) v(i, d) = p;
    y(i) = s.y[i];
  }
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(y);
  ExtrapolationModel m;
  m.kind = kind;
  m.degree = degree;
  m.params.assign(c.data(), c.data() + c.size());
  m.fitted = true;
  m.fit_residual = mean_sq_residual(m, s);
  return m;
}

// For fixed decay rate c the model is linear in (a, b).
std::pair<Eigen::Vector2d, double> exp_linear_part(const Samples& s, double c) {
  const auto n = static_cast<Eigen::Index>(s.x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::exp(-c * s.x[i]);
    y(i) = s.y[i];
  }
  const Eigen::Vector2d p = a.colPivHouseholderQr().solve(y);
  return {p, (a * p - y).squaredNorm() / static_cast<double>(n)};
}

ExtrapolationModel fit_exponential(const Samples& s) {
  const auto resid = [&](double log_c) { return exp_linear_part(s, std::exp(log_c)).second; };
  // Coarse scan over log c, then golden-section refinement around the best.
  constexpr double lo = -9.0, hi = 4.0;
  constexpr int grid = 131;
  int best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double r = resid(lo + (hi - lo) * i / (grid - 1));
    if (r < best_r) {
      best_r = r;
      best = i;
    }
  }
  const double step = (hi - lo) / (grid - 1);
  double a = lo + step * std::max(0, best - 1), b = lo + step * std::min(grid - 1, best + 1);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = resid(x1), f2 = resid(x2);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = resid(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = resid(x2);
    }
  }
  const double c = std::exp((a + b) / 2);
  const auto [p, r] = exp_linear_part(s, c);
  ExtrapolationModel m;
  m.kind = ModelKind::Exponential;
  m.params = {p(0), p(1), c};
  m.fitted = true;
  m.fit_residual = r;
  // A rate pinned to the slow end of the range is a line in disguise.
  m.fell_back_to_linear = best == 0;
  return m;
}

ExtrapolationModel fit_mlp(const Samples& s, const MlpSpec& spec) {
  ExtrapolationModel m;
  m.kind = ModelKind::Mlp;
  const auto [xmin, xmax] = std::minmax_element(s.x.begin(), s.x.end());
  m.x_min = *xmin;
  m.x_span = *xmax - *xmin;
  const double n = static_cast<double>(s.y.size());
  m.y_mean = std::accumulate(s.y.begin(), s.y.end(), 0.0) / n;
  double var = 0.0;
  for (double y : s.y) var += (y - m.y_mean) * (y - m.y_mean);
  const double sd = std::sqrt(var / n);
  m.fitted = true;
  if (sd < 1e-14) {
    // Constant targets: the network is not needed.
    m.y_scale = 0.0;
    m.fit_residual = 0.0;
    return m;
  }
  m.y_scale = sd;
  std::vector<double> xs(s.x.size()), ys(s.y.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = (s.x[i] - m.x_min) / m.x_span;
    ys[i] = (s.y[i] - m.y_mean) / m.y_scale;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < spec.restarts; ++r) {
    Mlp net(spec.hidden1, spec.hidden2, derive_seed(spec.seed, r));
    const auto history = net.fit(xs, ys, spec.epochs, spec.learning_rate);
    if (history.back() < best) {
      best = history.back();
      m.network = std::move(net);
    }
  }
  m.fit_residual = best * m.y_scale * m.y_scale;
  return m;
}

}  // namespace

double ScalePoint::mean() const {
  if (estimates.empty()) throw ValidationError("scale point without estimates");
  return std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(estimates.size());
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Polynomial: return "polynomial";
    case ModelKind::Exponential: return "exponential";
    case ModelKind::Mlp: return "mlp";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "linear") return ModelKind::Linear;
  if (s == "polynomial") return ModelKind::Polynomial;
  if (s == "exponential") return ModelKind::Exponential;
  if (s == "mlp") return ModelKind::Mlp;
  throw ValidationError("unknown extrapolation model '" + std::string(s) + "'");
}

void MlpSpec::validate() const {
  if (hidden1 == 0 || hidden2 == 0) throw ValidationError("MLP hidden widths must be positive");
  if (activation != "tanh") throw ValidationError("only the tanh activation is supported");
  if (!(learning_rate > 0.0)) throw ValidationError("MLP learning rate must be positive");
  if (restarts == 0) throw ValidationError("MLP needs at least one restart");
}

double ExtrapolationModel::evaluate(double lambda) const {
  if (!fitted) throw ValidationError("model has not been fitted");
  switch (kind) {
    case ModelKind::Linear:
    case ModelKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t d = params.size(); d-- > 0;) acc = acc * lambda + params[d];
      return acc;
    }
    case ModelKind::Exponential:
      if (fell_back_to_linear) return params[0] + params[1] * lambda;
      return params[0] + params[1] * std::exp(-params[2] * lambda);
    case ModelKind::Mlp:
      if (!network) return y_mean;
      return y_mean + y_scale * (*network)((lambda - x_min) / x_span);
  }
  return 0.0;
}

ExtrapolationModel fit(ModelKind kind, std::span<const ScalePoint> data, const MlpSpec& spec, int degree) {
  const Samples s = flatten(data);
  const std::size_t distinct = distinct_scales(data);
  switch (kind) {
    case ModelKind::Linear:
      if (distinct < 2) throw ValidationError("linear fit needs at least 2 distinct scales");
      return fit_polynomial(s, 1, ModelKind::Linear);
    case ModelKind::Polynomial:
      if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
      if (distinct < static_cast<std::size_t>(degree) + 1)
        throw ValidationError("polynomial degree " + std::to_string(degree) + " needs at least " +
                              std::to_string(degree + 1) + " distinct scales");
      return fit_polynomial(s, degree, ModelKind::Polynomial);
    case ModelKind::Exponential: {
      if (distinct < 3) throw ValidationError("exponential fit needs at least 3 distinct scales");
      ExtrapolationModel m = fit_exponential(s);
      const ExtrapolationModel line = fit_polynomial(s, 1, ModelKind::Linear);
      if (m.fell_back_to_linear || !std::isfinite(m.params[0]) || !std::isfinite(m.params[1]) ||
          m.fit_residual > line.fit_residual) {
        m.params = line.params;
        m.fit_residual = line.fit_residual;
        m.fell_back_to_linear = true;
      }
      return m;
    }
    case ModelKind::Mlp:
      if (distinct < 3) throw ValidationError("mlp fit needs at least 3 distinct scales");
      spec.validate();
      return fit_mlp(s, spec);
  }
  throw ValidationError("unknown model kind");
}

double extrapolate(const ExtrapolationModel& model) { return model.evaluate(0.0); }

std::vector<ScalePoint> collect(const ParamCircuit& c, std::span<const double> theta, const Hamiltonian& h,
                                const NoiseModel& noise, std::span<const double> scales, FoldMode mode,
                                const EnergyEstimator& est, std::size_t repeats, std::uint64_t seed) {
  if (scales.empty() || std::abs(scales[0] - 1.0) > 1e-12) throw ValidationError("scale list must start at 1");
  if (!std::is_sorted(scales.begin(), scales.end())) throw ValidationError("scale list must be ascending");
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  EnergyEstimator noisy = est;
  noisy.noise = noise;
  std::vector<ScalePoint> out;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const FoldedCircuit folded = fold(c, scales[k], mode);
    const Objective obj(folded.circuit, h, noisy);
    ScalePoint p{folded.achieved_scale, {}};
    if (est.mode == EstimatorMode::Exact) {
      const double e = obj.energy(theta);
      p.estimates.assign(repeats, e);
    } else {
      for (std::size_t r = 0; r < repeats; ++r)
        p.estimates.push_back(obj.energy(theta, derive_seed(derive_seed(seed, k), r)));
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<double, ZneDiagnostics> mitigated_energy(const ParamCircuit& c, std::span<const double> theta,
                                                   const Hamiltonian& h, const NoiseModel& noise,
                                                   const ZneConfig& cfg) {
  ZneDiagnostics diag;
  diag.points = collect(c, theta, h, noise, cfg.scales, cfg.fold_mode, cfg.estimator, cfg.repeats, cfg.seed);
  diag.model = fit(cfg.model, diag.points, cfg.mlp, cfg.degree);
  diag.linear_residual = fit(ModelKind::Linear, diag.points).fit_residual;
  diag.interpolation_warning = cfg.model == ModelKind::Mlp && diag.model.network && diag.model.fit_residual < 1e-12;
  return {extrapolate(diag.model), std::move(diag)};
}

}  // namespace mpsvqe::zne
