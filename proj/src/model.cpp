#include "ocrnn/model.hpp"

#include "ocrnn/matrix_kit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocrnn {

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) {
    throw InvalidArgument("dataset needs at least one observation and one input, got X " +
                          shape_str(X));
  }
  if (Y.size() != X.rows()) {
    throw InvalidArgument("dataset has " + std::to_string(X.rows()) + " rows in X but " +
                          std::to_string(Y.size()) + " targets");
  }
  require_finite(X, "X");
  require_finite(Y, "Y");
}

std::vector<std::string> ModelConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("model." + field + ": " + why);
  };
  if (n_neurons < 1) fail("n_neurons", "must be at least 1");
  if (!(theta_W > 0.0) || !std::isfinite(theta_W)) fail("theta_W", "must be positive");
  if (!(theta_V > 0.0) || !std::isfinite(theta_V)) fail("theta_V", "must be positive");
  if (beta.size() != n_neurons) fail("beta", "length must equal n_neurons");
  if (b.size() != n_neurons) fail("b", "length must equal n_neurons");
  if (!beta.allFinite()) fail("beta", "non-finite entry");
  if (!b.allFinite()) fail("b", "non-finite entry");
  if (!(delta > 0.0 && delta <= 1.0)) fail("delta", "must lie in (0, 1]");
  if (max_outer_iters < 1) fail("max_outer_iters", "must be at least 1");
  if (!(outer_tol > 0.0)) fail("outer_tol", "must be positive");
  if (!(inner_tol > 0.0)) fail("inner_tol", "must be positive");
  if (inner_max_iters < 1) fail("inner_max_iters", "must be at least 1");
  try {
    activation.check_columns(n_neurons);
    for (const auto& s : activation.specs()) s.validate();
  } catch (const InvalidArgument& e) {
    fail("activation", e.what());
  }

  std::vector<std::string> warnings;
  if (beta.squaredNorm() == 0.0) {
    warnings.emplace_back("beta'beta = 0: convergence diagnostics are undefined");
  }
  if (theta_W <= 1.0) {
    warnings.emplace_back("theta_W <= 1: the variable bounds on mu and U are infinite");
  }
  return warnings;
}

namespace {

void check_weights(const WeightSet& w, Eigen::Index n_in) {
  const Eigen::Index n = w.W.rows();
  if (w.W.cols() != n) throw InvalidArgument("W must be square, got " + shape_str(w.W));
  if (w.V.rows() != n_in || w.V.cols() != n) {
    throw InvalidArgument("V must be " + std::to_string(n_in) + "x" + std::to_string(n) +
                          ", got " + shape_str(w.V));
  }
  if (w.b.size() != n) throw InvalidArgument("b length does not match W");
}

}  // namespace

ForwardSolution solve_U_forward_traced(const Matrix& X, const WeightSet& weights,
                                       const ColumnActivations& activation, double tol,
                                       std::size_t max_iters, const std::optional<Matrix>& start) {
  check_weights(weights, X.cols());
  require_finite(X, "X");
  require_finite(weights.W, "W");
  require_finite(weights.V, "V");
  const double wnorm = matrix_kit::spectral_norm(weights.W);
  if (!(wnorm < 1.0)) {
    throw DomainError("forward solve needs ||W|| < 1 for a contraction, got " +
                      std::to_string(wnorm));
  }
  const Matrix base = X * weights.V + ones_times(weights.b, X.rows());

  ForwardSolution sol;
  sol.U = start ? *start : base;
  if (sol.U.rows() != base.rows() || sol.U.cols() != base.cols()) {
    throw InvalidArgument("forward solve start has shape " + shape_str(sol.U) + ", expected " +
                          shape_str(base));
  }
  double res = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < max_iters; ++k) {
    Matrix next = base + activation.apply(sol.U) * weights.W;
    res = (sol.U - next).norm();
    sol.residuals.push_back(res);
    sol.U = std::move(next);
    sol.iterations = k + 1;
    // ||U_{k+1} - G(U_{k+1})|| <= ||W|| res, so the returned iterate meets tol.
    if (res <= tol) return sol;
  }
  throw NonConvergence("forward solve did not reach tol " + std::to_string(tol) + " in " +
                           std::to_string(max_iters) + " iterations (last residual " +
                           std::to_string(res) + ")",
                       res);
}

Matrix solve_U_forward(const Matrix& X, const WeightSet& weights,
                       const ColumnActivations& activation, double tol, std::size_t max_iters,
                       const std::optional<Matrix>& start) {
  return solve_U_forward_traced(X, weights, activation, tol, max_iters, start).U;
}

double semicircle_penalty(const Matrix& W, double theta_W) {
  const double arg = 1.0 - theta_W * theta_W * W.squaredNorm();
  if (arg < 0.0) {
    throw DomainError("W lies outside the semicircle domain theta_W^2 tr(W'W) <= 1");
  }
  return (1.0 - std::sqrt(arg)) / (2.0 * theta_W);
}

Matrix semicircle_gradient(const Matrix& W, double theta_W) {
  const double arg = 1.0 - theta_W * theta_W * W.squaredNorm();
  if (!(arg > 0.0)) {
    throw DomainError("semicircle gradient is undefined on or outside the boundary");
  }
  return (0.5 * theta_W / std::sqrt(arg)) * W;
}

double loss(const Matrix& U, const WeightSet& weights, const Dataset& data,
            const ModelConfig& config) {
  check_weights(weights, data.n_in());
  if (U.rows() != data.n_obs() || U.cols() != weights.W.rows()) {
    throw InvalidArgument("loss: U has shape " + shape_str(U));
  }
  if (config.beta.size() != U.cols()) throw InvalidArgument("loss: beta length mismatch");
  const Vector eps = data.Y - U * config.beta;
  return 0.5 * eps.squaredNorm() + semicircle_penalty(weights.W, config.theta_W) +
         0.5 * config.theta_V * weights.V.squaredNorm();
}

Vector predict(const Matrix& new_X, const WeightSet& weights, const Vector& beta,
               const ColumnActivations& activation, double tol, std::size_t max_iters) {
  if (beta.size() != weights.W.rows()) throw InvalidArgument("predict: beta length mismatch");
  const Matrix U = solve_U_forward(new_X, weights, activation, tol, max_iters);
  return U * beta;
}

FocReport foc_residuals(const IterState& state, const WeightSet& weights, const Dataset& data,
                        const ModelConfig& config) {
  check_weights(weights, data.n_in());
  const Eigen::Index n = weights.W.rows();
  if (state.U.rows() != data.n_obs() || state.U.cols() != n || state.mu.rows() != data.n_obs() ||
      state.mu.cols() != n) {
    throw InvalidArgument("foc_residuals: state shape does not match data/weights");
  }
  const Matrix& U = state.U;
  const Matrix& mu = state.mu;
  const Matrix& W = weights.W;
  const Matrix FU = config.activation.apply(U);
  const Matrix dFU = config.activation.derivative(U);
  const Vector eps = data.Y - U * config.beta;
  const Vector lambda = -eps;

  FocReport rep;
  rep.residuals[0] = (eps + lambda).norm();

  const double arg = 1.0 - config.theta_W * config.theta_W * W.squaredNorm();
  if (arg > 0.0) {
    rep.residuals[1] = (config.theta_W / std::sqrt(arg) * W - FU.transpose() * mu).norm();
  } else {
    rep.residuals[1] = std::numeric_limits<double>::infinity();
  }
  rep.residuals[2] = (config.theta_V * weights.V - data.X.transpose() * mu).norm();
  rep.residuals[3] =
      (U - data.X * weights.V - ones_times(weights.b, data.n_obs()) - FU * W).norm();
  rep.residuals[4] = (U * config.beta + eps - data.Y).norm();
  rep.residuals[5] =
      (lambda * config.beta.transpose() + mu - dFU.cwiseProduct(mu * W.transpose())).norm();

  double worst = 0.0;
  for (double r : rep.residuals) worst = std::max(worst, r);
  rep.aggregate = worst / (1.0 + data.Y.norm());
  return rep;
}

}  // namespace ocrnn
