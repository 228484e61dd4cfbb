#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mpsvqe {

/// Scalar-to-scalar network with three fully connected layers
/// 1 -> h1 -> h2 -> 1 and tanh hidden activations.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t h1, std::size_t h2, std::uint64_t seed);  // Glorot-uniform init

  double operator()(double x) const;
  std::size_t n_params() const;

  /// Full-batch gradient descent on mean squared error. Returns the loss
  /// before every epoch followed by the final loss.
  std::vector<double> fit(std::span<const double> x, std::span<const double> y, std::size_t epochs,
                          double learning_rate);
  double loss(std::span<const double> x, std::span<const double> y) const;

 private:
  Eigen::VectorXd w1_, b1_;  // h1
  Eigen::MatrixXd w2_;       // h2 x h1
  Eigen::VectorXd b2_;       // h2
  Eigen::VectorXd w3_;       // h2
  double b3_ = 0.0;
};

}  // namespace mpsvqe
