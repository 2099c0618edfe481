#include "ocrnn/foc_solver.hpp"

#include <cmath>

namespace ocrnn {

Matrix closed_form_W(const Matrix& U, const Matrix& mu, double theta_W,
                     const ColumnActivations& activation) {
  if (!(theta_W > 0.0)) throw InvalidArgument("closed_form_W: theta_W must be positive");
  if (U.rows() != mu.rows() || U.cols() != mu.cols()) {
    throw InvalidArgument("closed_form_W: U " + shape_str(U) + " and mu " + shape_str(mu) +
                          " differ in shape");
  }
  const Matrix G = activation.apply(U).transpose() * mu;
  const double scale = 1.0 / (theta_W * std::sqrt(1.0 + G.squaredNorm()));
  return scale * G;
}

BPair assemble_B(const Matrix& U, const Matrix& mu, const Matrix& W, const Vector& b,
                 const Vector& Y, const Vector& beta, const ColumnActivations& activation) {
  const Eigen::Index n_obs = U.rows();
  const Eigen::Index n = U.cols();
  if (mu.rows() != n_obs || mu.cols() != n || W.rows() != n || W.cols() != n ||
      b.size() != n || beta.size() != n || Y.size() != n_obs) {
    throw InvalidArgument("assemble_B: shape mismatch (U " + shape_str(U) + ", mu " +
                          shape_str(mu) + ", W " + shape_str(W) + ")");
  }
  BPair out;
  out.B1 = ones_times(b, n_obs) + activation.apply(U) * W;
  out.B2 = Y * beta.transpose() + activation.derivative(U).cwiseProduct(mu * W.transpose());
  return out;
}

IterState partial_solve(const Matrix& B1, const Matrix& B2, const QOperator& Q,
                        const Vector& beta) {
  if (B1.rows() != Q.size() || B2.rows() != Q.size() || B1.cols() != beta.size() ||
      B2.cols() != beta.size()) {
    throw InvalidArgument("partial_solve: B1/B2 must be n_obs x n_neurons");
  }
  const double btb = beta.squaredNorm();
  auto shifted_inverse = [&](const Matrix& m) -> Matrix {
    if (Q.shift() == btb) return Q.shifted_inverse_apply(m);
    return matrix_kit::woodbury_apply(Q.factor(), btb / Q.theta_V(), m);
  };
  // X = D - (I + b'b Q)^{-1} Q D b b' for D1 = B1 + Q B2, D2 = B2 - B1 b b'.
  const Matrix d1 = B1 + Q.apply(B2);
  const Matrix d2 = B2 - (B1 * beta) * beta.transpose();
  const Matrix corr = shifted_inverse(Q.apply(Matrix(d1 * beta)));
  const Matrix corr2 = shifted_inverse(Q.apply(Matrix(d2 * beta)));
  IterState out;
  out.U = d1 - corr * beta.transpose();
  out.mu = d2 - corr2 * beta.transpose();
  return out;
}

Matrix recover_V(const Matrix& X, const Matrix& mu, double theta_V) {
  if (!(theta_V > 0.0)) throw InvalidArgument("recover_V: theta_V must be positive");
  if (X.rows() != mu.rows()) throw InvalidArgument("recover_V: X and mu row counts differ");
  return X.transpose() * mu / theta_V;
}

namespace {

Matrix q_factor(const Dataset& data, const ConstraintSet* cs) {
  if (!cs || cs->n_is_identity()) return data.X;
  return data.X * cs->n_basis();
}

}  // namespace

ContractionMap::ContractionMap(const Dataset& data, const ModelConfig& config,
                               const ConstraintSet* constraints)
    : data_(data),
      config_(config),
      cs_(constraints),
      q_(q_factor(data, constraints), config.theta_V, config.beta.squaredNorm()) {
  if (cs_) {
    if (cs_->n_in() != data.n_in() || cs_->n_neurons() != config.n_neurons) {
      throw InvalidArgument("constraint set dimensions do not match the model");
    }
    if (!cs_->feasible(config.theta_W)) {
      throw DomainError("constraint set is infeasible: ||W2||_F >= 1/theta_W");
    }
    if (!cs_->n_is_identity()) {
      const Eigen::Index n_in = cs_->n_in();
      b1_offset_ = data.X * ((Matrix::Identity(n_in, n_in) - cs_->n_projector()) * cs_->V0());
    }
  }
}

Matrix ContractionMap::weights_W(const IterState& s) const {
  if (cs_) return constrained_W(s.U, s.mu, config_.theta_W, *cs_, config_.activation);
  return closed_form_W(s.U, s.mu, config_.theta_W, config_.activation);
}

Matrix ContractionMap::weights_V(const IterState& s) const {
  if (cs_) return recover_V_constrained(data_.X, s.mu, config_.theta_V, *cs_);
  return recover_V(data_.X, s.mu, config_.theta_V);
}

IterState ContractionMap::undamped(const IterState& s) const {
  const Matrix W = weights_W(s);
  auto [B1, B2] = assemble_B(s.U, s.mu, W, config_.b, data_.Y, config_.beta, config_.activation);
  if (b1_offset_.size() != 0) B1 += b1_offset_;
  return partial_solve(B1, B2, q_, config_.beta);
}

IterState ContractionMap::step(const IterState& s, double delta) const {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgument("contraction step: delta must lie in [0, 1]");
  }
  if (delta == 0.0) return s;
  IterState target = undamped(s);
  if (delta == 1.0) return target;
  IterState out;
  out.U = (1.0 - delta) * s.U + delta * target.U;
  out.mu = (1.0 - delta) * s.mu + delta * target.mu;
  return out;
}

IterState contraction_step(const IterState& state, double delta, const Dataset& data,
                           const ModelConfig& config, const ConstraintSet* constraints) {
  return ContractionMap(data, config, constraints).step(state, delta);
}

IterState default_initial_state(const Dataset& data, const ModelConfig& config) {
  IterState s;
  s.U = ones_times(config.b, data.n_obs());
  s.mu = (data.Y - s.U * config.beta) * config.beta.transpose();
  return s;
}

TrainResult train(const Dataset& data, const ModelConfig& config, const ConstraintSet* constraints,
                  const TrainOptions& options) {
  data.validate();
  TrainResult result;
  result.warnings = config.validate();
  const ContractionMap map(data, config, constraints);

  IterState state = options.initial ? *options.initial : default_initial_state(data, config);
  if (state.U.rows() != data.n_obs() || state.U.cols() != config.n_neurons ||
      state.mu.rows() != data.n_obs() || state.mu.cols() != config.n_neurons) {
    throw InvalidArgument("train: initial state must be n_obs x n_neurons");
  }
  Matrix W = map.weights_W(state);
  Matrix V = map.weights_V(state);
  double delta = config.delta;

  for (std::size_t it = 1; it <= config.max_outer_iters; ++it) {
    IterState next = map.step(state, delta);
    while (!next.U.allFinite() || !next.mu.allFinite()) {
      if (!config.halve_delta_on_divergence || result.delta_halvings >= 60) {
        throw Divergence("training state became non-finite at iteration " + std::to_string(it),
                         it);
      }
      delta *= 0.5;
      ++result.delta_halvings;
      next = map.step(state, delta);
    }

    Matrix W_next = map.weights_W(next);
    Matrix V_next = map.weights_V(next);
    double change = 0.0;
    if (config.param_delta_metric == DeltaMetric::weights) {
      change = (W_next - W).squaredNorm() + (V_next - V).squaredNorm();
    } else {
      change = (next.U - state.U).squaredNorm() + (next.mu - state.mu).squaredNorm();
    }
    state = std::move(next);
    W = std::move(W_next);
    V = std::move(V_next);

    const double sse = (data.Y - state.U * config.beta).squaredNorm();
    result.sse_trace.push_back(sse);
    result.param_delta_trace.push_back(change);
    result.iterations = it;
    if (options.observer) options.observer(IterationView{it, state, W, V, sse, change});
    if (change <= config.outer_tol) {
      result.converged = true;
      break;
    }
  }

  result.weights = WeightSet{W, V, config.b};
  result.state = std::move(state);
  result.final_delta = delta;
  result.foc_report = foc_residuals(result.state, result.weights, data, config);
  return result;
}

}  // namespace ocrnn
