#pragma once

// Training by damped fixed-point iteration on the reduced stationarity
// system
//
//   U  = Q mu + B1(U, mu)
//   mu = -U beta beta' + B2(U, mu)
//
// where W(U, mu) is eliminated in closed form and the linear part is solved
// exactly for given (B1, B2). The update is
//
//   T(U, mu) = (1 - delta) (U, mu) + delta (U_B, mu_B).

#include "ocrnn/constraints.hpp"
#include "ocrnn/model.hpp"
#include "ocrnn/q_operator.hpp"
#include "ocrnn/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ocrnn {

// W = F(U)'mu / (theta_W sqrt(1 + ||F(U)'mu||_F^2)); ||W||_F < 1/theta_W.
Matrix closed_form_W(const Matrix& U, const Matrix& mu, double theta_W,
                     const ColumnActivations& activation);

struct BPair {
  Matrix B1;  // 1b' + F(U) W
  Matrix B2;  // Y beta' + F'(U) o (mu W')
};

BPair assemble_B(const Matrix& U, const Matrix& mu, const Matrix& W, const Vector& b,
                 const Vector& Y, const Vector& beta, const ColumnActivations& activation);

// Exact solution (U_B, mu_B) of U = Q mu + B1, mu = -U beta beta' + B2, with
// every (I + beta'beta Q)^{-1} routed through the Woodbury factorisation.
IterState partial_solve(const Matrix& B1, const Matrix& B2, const QOperator& Q,
                        const Vector& beta);

// V = X'mu / theta_V.
Matrix recover_V(const Matrix& X, const Matrix& mu, double theta_V);

// Precomputed pieces of T for one (data, config, constraints) triple.
class ContractionMap {
 public:
  ContractionMap(const Dataset& data, const ModelConfig& config,
                 const ConstraintSet* constraints = nullptr);

  Matrix weights_W(const IterState& state) const;
  Matrix weights_V(const IterState& state) const;

  // (U_B, mu_B) at the given state.
  IterState undamped(const IterState& state) const;
  IterState step(const IterState& state, double delta) const;

  const QOperator& Q() const { return q_; }

 private:
  const Dataset& data_;
  const ModelConfig& config_;
  const ConstraintSet* cs_;
  QOperator q_;
  Matrix b1_offset_;  // X (I - P_N) V0, empty when N = I
};

IterState contraction_step(const IterState& state, double delta, const Dataset& data,
                           const ModelConfig& config,
                           const ConstraintSet* constraints = nullptr);

struct IterationView {
  std::size_t iteration;  // 1-based
  const IterState& state;
  const Matrix& W;
  const Matrix& V;
  double sse;
  double param_delta;
};

struct TrainOptions {
  std::optional<IterState> initial;  // default U = 1b', mu = (Y - U beta) beta'
  std::function<void(const IterationView&)> observer;
};

struct TrainResult {
  WeightSet weights;
  IterState state;
  std::size_t iterations = 0;
  std::vector<double> sse_trace;
  std::vector<double> param_delta_trace;
  bool converged = false;
  FocReport foc_report;
  double final_delta = 0.0;
  std::size_t delta_halvings = 0;
  std::vector<std::string> warnings;
};

IterState default_initial_state(const Dataset& data, const ModelConfig& config);

TrainResult train(const Dataset& data, const ModelConfig& config,
                  const ConstraintSet* constraints = nullptr, const TrainOptions& options = {});

}  // namespace ocrnn
