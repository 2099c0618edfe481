#pragma once

// The regression model in the activation domain:
//
//   U = X V + 1 b' + F(U) W      (one row per observation)
//   Y = U beta + eps
//
// with loss 1/2 eps'eps + semicircle(W) + theta_V/2 tr(V'V).

#include "ocrnn/activation.hpp"
#include "ocrnn/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ocrnn {

struct Dataset {
  Matrix X;  // n_obs x n_in
  Vector Y;  // n_obs

  Eigen::Index n_obs() const { return X.rows(); }
  Eigen::Index n_in() const { return X.cols(); }

  void validate() const;
};

enum class DeltaMetric {
  weights,  // squared Frobenius change of (W, V)
  state,    // squared Frobenius change of (U, mu)
};

struct ModelConfig {
  Eigen::Index n_neurons = 1;
  double theta_W = 1.2;
  double theta_V = 0.05;
  Vector beta;
  Vector b;
  ColumnActivations activation;
  double delta = 0.001;
  std::size_t max_outer_iters = 20000;
  double outer_tol = 1e-3;
  double inner_tol = 1e-10;
  std::size_t inner_max_iters = 10000;
  DeltaMetric param_delta_metric = DeltaMetric::weights;
  // Halve delta and redo the step when the state turns non-finite.
  bool halve_delta_on_divergence = true;

  // Throws ConfigError for invalid values; returns advisory warnings
  // (beta'beta == 0, theta_W <= 1).
  std::vector<std::string> validate() const;
};

struct WeightSet {
  Matrix W;  // n_neurons x n_neurons
  Matrix V;  // n_in x n_neurons
  Vector b;  // n_neurons
};

struct IterState {
  Matrix U;   // n_obs x n_neurons
  Matrix mu;  // n_obs x n_neurons
};

struct ForwardSolution {
  Matrix U;
  std::size_t iterations = 0;
  std::vector<double> residuals;  // residual of each iterate before the update
};

// Fixed point of U = XV + 1b' + F(U)W by plain iteration from `start`
// (default XV + 1b'). Requires the spectral norm of W below one.
ForwardSolution solve_U_forward_traced(const Matrix& X, const WeightSet& weights,
                                       const ColumnActivations& activation, double tol,
                                       std::size_t max_iters,
                                       const std::optional<Matrix>& start = std::nullopt);

Matrix solve_U_forward(const Matrix& X, const WeightSet& weights,
                       const ColumnActivations& activation, double tol, std::size_t max_iters,
                       const std::optional<Matrix>& start = std::nullopt);

// 1/(2 theta_W) (1 - sqrt(1 - theta_W^2 tr(W'W))); DomainError outside the disc.
double semicircle_penalty(const Matrix& W, double theta_W);

// d/dW of semicircle_penalty: (theta_W / 2) (1 - theta_W^2 tr(W'W))^{-1/2} W.
Matrix semicircle_gradient(const Matrix& W, double theta_W);

double loss(const Matrix& U, const WeightSet& weights, const Dataset& data,
            const ModelConfig& config);

Vector predict(const Matrix& new_X, const WeightSet& weights, const Vector& beta,
               const ColumnActivations& activation, double tol = 1e-10,
               std::size_t max_iters = 10000);

// Frobenius norms of the six stationarity conditions, eps and lambda
// substituted as eps = Y - U beta, lambda = -eps.
struct FocReport {
  static constexpr std::array<const char*, 6> kNames = {
      "eps_plus_lambda",   "w_stationarity",       "v_stationarity",
      "activation_domain", "regression_identity", "u_stationarity"};

  std::array<double, 6> residuals{};
  double aggregate = 0.0;  // max residual / (1 + ||Y||)
};

FocReport foc_residuals(const IterState& state, const WeightSet& weights, const Dataset& data,
                        const ModelConfig& config);

// 1 b' as an n x k matrix.
inline Matrix ones_times(const Vector& b, Eigen::Index n) {
  return Vector::Ones(n) * b.transpose();
}

}  // namespace ocrnn
