#include "mpsvqe/mlp.hpp"

#include <cmath>
#include <random>

#include "mpsvqe/errors.hpp"

namespace mpsvqe {

Mlp::Mlp(std::size_t h1, std::size_t h2, std::uint64_t seed) {
  if (h1 == 0 || h2 == 0) throw ValidationError("hidden widths must be positive");
  std::mt19937_64 rng(seed);
  const auto glorot = [&](Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = limit * u(rng);
    return m;
  };
  const auto n1 = static_cast<Eigen::Index>(h1), n2 = static_cast<Eigen::Index>(h2);
  w1_ = glorot(n1, 1, 1, static_cast<double>(h1));
  b1_ = Eigen::VectorXd::Zero(n1);
  w2_ = glorot(n2, n1, static_cast<double>(h1), static_cast<double>(h2));
  b2_ = Eigen::VectorXd::Zero(n2);
  w3_ = glorot(n2, 1, static_cast<double>(h2), 1);
  b3_ = 0.0;
}

std::size_t Mlp::n_params() const {
  return static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() + 1);
}

double Mlp::operator()(double x) const {
  const Eigen::VectorXd a1 = (w1_ * x + b1_).array().tanh();
  const Eigen::VectorXd a2 = (w2_ * a1 + b2_).array().tanh();
  return w3_.dot(a2) + b3_;
}

double Mlp::loss(std::span<const double> x, std::span<const double> y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (*this)(x[i]) - y[i];
    acc += r * r;
  }
  return acc / static_cast<double>(x.size());
}

std::vector<double> Mlp::fit(std::span<const double> x, std::span<const double> y, std::size_t epochs,
                             double learning_rate) {
  if (x.size() != y.size() || x.empty()) throw ValidationError("MLP training data must be non-empty and paired");
  const double inv_n = 1.0 / static_cast<double>(x.size());
  std::vector<double> history;
  history.reserve(epochs + 1);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    Eigen::VectorXd gw1 = Eigen::VectorXd::Zero(w1_.size()), gb1 = gw1;
    Eigen::MatrixXd gw2 = Eigen::MatrixXd::Zero(w2_.rows(), w2_.cols());
    Eigen::VectorXd gb2 = Eigen::VectorXd::Zero(b2_.size()), gw3 = gb2;
    double gb3 = 0.0, total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Eigen::VectorXd a1 = (w1_ * x[i] + b1_).array().tanh();
      const Eigen::VectorXd a2 = (w2_ * a1 + b2_).array().tanh();
      const double r = w3_.dot(a2) + b3_ - y[i];
      total += r * r;
      const double d_out = 2.0 * r * inv_n;
      gw3 += d_out * a2;
      gb3 += d_out;
      const Eigen::VectorXd d2 = (d_out * w3_).array() * (1.0 - a2.array().square());
      gw2 += d2 * a1.transpose();
      gb2 += d2;
      const Eigen::VectorXd d1 = (w2_.transpose() * d2).array() * (1.0 - a1.array().square());
      gw1 += d1 * x[i];
      gb1 += d1;
    }
    history.push_back(total * inv_n);
    w1_ -= learning_rate * gw1;
    b1_ -= learning_rate * gb1;
    w2_ -= learning_rate * gw2;
    b2_ -= learning_rate * gb2;
    w3_ -= learning_rate * gw3;
    b3_ -= learning_rate * gb3;
  }
  history.push_back(loss(x, y));
  return history;
}

}  // namespace mpsvqe
