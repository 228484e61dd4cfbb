#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mpsvqe/errors.hpp"
#include "mpsvqe/zne.hpp"

using namespace mpsvqe;
using namespace mpsvqe::zne;

namespace {
std::vector<ScalePoint> points(const std::vector<double>& l, double (*f)(double)) {
  std::vector<ScalePoint> out;
  for (double x : l) out.push_back({x, {f(x)}});
  return out;
}
MlpSpec quick_mlp() {
  MlpSpec s;
  s.epochs = 2000;
  s.restarts = 3;
  return s;
}
}  // namespace

TEST(Fit, LinearThroughTwoPoints) {
  const std::vector<ScalePoint> d = {{1, {-1.0}}, {3, {-0.8}}};
  const auto m = fit(ModelKind::Linear, d);
  EXPECT_NEAR(extrapolate(m), -1.1, 1e-12);
  EXPECT_LT(m.fit_residual, 1e-10);
}

TEST(Fit, PolynomialInterpolatesExactly) {
  const auto d = points({1, 2, 3}, [](double x) { return 1 - 2 * x + 0.5 * x * x; });
  const auto m = fit(ModelKind::Polynomial, d, {}, 2);
  EXPECT_LT(m.fit_residual, 1e-10);
  EXPECT_NEAR(extrapolate(m), 1.0, 1e-10);
  EXPECT_THROW(fit(ModelKind::Polynomial, d, {}, 3), ValidationError);
}

TEST(Fit, ExponentialRecoversAsymptote) {
  const auto d = points({1, 2, 3, 5}, [](double x) { return 2 + 0.5 * std::exp(-0.7 * x); });
  const auto m = fit(ModelKind::Exponential, d);
  EXPECT_FALSE(m.fell_back_to_linear);
  EXPECT_NEAR(m.params[0], 2.0, 1e-3);
  EXPECT_NEAR(extrapolate(m), 2.5, 1e-3);
}

TEST(Fit, ExponentialFallsBackWhenCurvatureIsWrong) {
  // Concave-up growth cannot be a decaying exponential plus offset.
  const auto d = points({1, 2, 3}, [](double x) { return -x * x; });
  const auto m = fit(ModelKind::Exponential, d);
  EXPECT_TRUE(m.fell_back_to_linear);
  EXPECT_TRUE(std::isfinite(extrapolate(m)));
}

TEST(Fit, ConstantDataEveryModel) {
  const auto d = points({1, 3, 5}, [](double) { return -2.1; });
  for (ModelKind k : {ModelKind::Linear, ModelKind::Polynomial, ModelKind::Exponential, ModelKind::Mlp})
    EXPECT_NEAR(extrapolate(fit(k, d, quick_mlp(), 2)), -2.1, 1e-6) << to_string(k);
}

TEST(Fit, LinearIsAffineEquivariant) {
  const auto d = points({1, 3, 5}, [](double x) { return std::sin(x); });
  auto shifted = d;
  for (auto& p : shifted) p.estimates[0] += 0.37;
  EXPECT_NEAR(extrapolate(fit(ModelKind::Linear, shifted)), extrapolate(fit(ModelKind::Linear, d)) + 0.37, 1e-12);
}

TEST(Fit, InsufficientData) {
  const auto two = points({1, 3}, [](double x) { return x; });
  EXPECT_THROW(fit(ModelKind::Exponential, two), ValidationError);
  EXPECT_THROW(fit(ModelKind::Mlp, two), ValidationError);
  const std::vector<ScalePoint> one_scale = {{1, {1.0, 2.0}}};
  EXPECT_THROW(fit(ModelKind::Linear, one_scale), ValidationError);
  EXPECT_THROW(extrapolate(ExtrapolationModel{}), ValidationError);
}

TEST(Mlp, LossNonIncreasingOnSyntheticExponential) {
  std::vector<double> x, y;
  for (double l : {1.0, 2.0, 3.0, 5.0}) {
    x.push_back((l - 1) / 4);
    y.push_back(2 + 0.5 * std::exp(-0.7 * l));
  }
  double mean = 0, sd = 0;
  for (double v : y) mean += v / 4;
  for (double v : y) sd += (v - mean) * (v - mean) / 4;
  for (double& v : y) v = (v - mean) / std::sqrt(sd);
  Mlp net(16, 16, 1);
  const auto history = net.fit(x, y, 5000, 1e-2);
  for (std::size_t i = 1; i < history.size(); ++i) EXPECT_LE(history[i], history[i - 1] + 1e-12) << i;
  EXPECT_LT(history.back(), history.front());
}

TEST(Mlp, FitsSmoothCurveAndIsSeeded) {
  const auto d = points({1, 2, 3, 4, 5}, [](double x) { return -2.0 + 0.05 * x; });
  const auto a = fit(ModelKind::Mlp, d, quick_mlp());
  const auto b = fit(ModelKind::Mlp, d, quick_mlp());
  EXPECT_EQ(extrapolate(a), extrapolate(b));
  EXPECT_NEAR(a.evaluate(3.0), -1.85, 5e-3);
}

TEST(Collect, ZeroNoiseAllScalesEqual) {
  const auto h = testing_util::random_hamiltonian(3, 8, 2);
  const auto c = build_ansatz(3, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 3);
  const double exact = energy(c, theta, h, {});
  const double scales[] = {1, 3, 5};
  const auto pts = collect(c, theta, h, NoiseModel::none(), scales, FoldMode::PerGate, {}, 1, 0);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& p : pts) {
    ASSERT_EQ(p.estimates.size(), 1u);
    EXPECT_NEAR(p.estimates[0], exact, 1e-9);
  }
  const double bad[] = {3, 5};
  EXPECT_THROW(collect(c, theta, h, NoiseModel::none(), bad, FoldMode::PerGate, {}, 1, 0), ValidationError);
}

TEST(Mitigation, ZeroNoisePipelineIsExact) {
  const auto h = testing_util::random_hamiltonian(3, 8, 4);
  const auto c = build_ansatz(3, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 5);
  const double exact = energy(c, theta, h, {});
  for (ModelKind k : {ModelKind::Linear, ModelKind::Exponential, ModelKind::Mlp}) {
    ZneConfig cfg;
    cfg.model = k;
    cfg.mlp = quick_mlp();
    const auto [e, diag] = mitigated_energy(c, theta, h, NoiseModel::none(), cfg);
    EXPECT_NEAR(e, exact, 1e-6) << to_string(k);
    EXPECT_EQ(diag.points.size(), 3u);
  }
}

TEST(Mitigation, NoisyEnergiesDegradeWithScaleAndLinearHelps) {
  const auto h = testing_util::random_hamiltonian(3, 8, 6);
  const auto c = prepend_reference_state(build_ansatz(3, 1), "110");
  const auto theta = testing_util::random_angles(c.n_params(), 7, 0.5);
  const double exact = energy(c, theta, h, {});
  ZneConfig cfg;
  cfg.model = ModelKind::Linear;
  const auto [e, diag] = mitigated_energy(c, theta, h, NoiseModel::paper(), cfg);
  const double raw = diag.points[0].mean();
  EXPECT_LT(std::abs(diag.points[0].mean() - exact), std::abs(diag.points[2].mean() - exact));
  EXPECT_LT(std::abs(e - exact), std::abs(raw - exact));
}

TEST(Mitigation, SampledModeDeterministicUnderSeed) {
  const auto h = testing_util::random_hamiltonian(2, 5, 8);
  const auto c = build_ansatz(2, 1);
  const auto theta = testing_util::random_angles(c.n_params(), 9);
  ZneConfig cfg;
  cfg.model = ModelKind::Linear;
  cfg.repeats = 3;
  cfg.estimator.mode = EstimatorMode::Sampled;
  cfg.estimator.shots = 500;
  cfg.seed = 5;
  const auto a = mitigated_energy(c, theta, h, NoiseModel::paper(), cfg);
  const auto b = mitigated_energy(c, theta, h, NoiseModel::paper(), cfg);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second.points[1].estimates.size(), 3u);
}
