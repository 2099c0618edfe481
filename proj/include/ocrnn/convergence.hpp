#pragma once

// Existence/uniqueness diagnostics: variable bounds, the contraction
// thresholds on theta_W (general, Omega-restricted and constrained), and a
// sampled estimate of the contraction factor.
//
// All reports are advisory. The thresholds are sufficient conditions; a run
// that violates them may still converge.

#include "ocrnn/constraints.hpp"
#include "ocrnn/model.hpp"
#include "ocrnn/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ocrnn {

struct BoundsReport {
  double sup_W = 0.0;
  double sup_mu = 0.0;
  double sup_U = 0.0;
  double sup_FU = 0.0;
  bool finite = true;
  std::vector<std::string> warnings;
};

struct ConditionReport {
  double threshold = 0.0;
  double theta_W = 0.0;
  bool satisfied = false;
  double kappa_GXbeta = 0.0;
  double norm_GUmu = 0.0;
  double ratio_term = 0.0;
  double norm_Q = 0.0;
  double beta_sq = 0.0;
  std::optional<double> kappa_omega;
  std::optional<OmegaReport> omega_check;  // verify_omega on a trained W
  std::optional<double> projector_norm;    // constrained report only
};

BoundsReport variable_bounds(const Dataset& data, const ModelConfig& config);

// Largest eigenvalue of a symmetric 2x2 [[a, c], [c, d]].
double symmetric_2x2_norm(double a, double c, double d);

ConditionReport general_condition_report(const Dataset& data, const ModelConfig& config);

ConditionReport omega_condition_report(const Dataset& data, const ModelConfig& config,
                                const Matrix& omega,
                                const std::optional<Matrix>& trained_W = std::nullopt);

// The block matrix [[I, -I (x) Q^], [(beta beta') (x) I, I]] assembled densely.
Matrix constrained_G_X_beta(const QOperator& q_hat, const Vector& beta);

ConditionReport constrained_condition_report(const Dataset& data, const ModelConfig& config,
                                             const ConstraintSet& cs,
                                             const std::optional<Matrix>& omega = std::nullopt);

// max over sampled pairs inside the variable-bound box of
// ||T(p1) - T(p2)||_F / ||p1 - p2||_F, with T using config.delta.
double empirical_contraction_factor(const Dataset& data, const ModelConfig& config,
                                    const ConstraintSet* constraints, std::size_t n_pairs,
                                    std::uint64_t seed);

// Uniform sample from the Frobenius ball of the given radius.
Matrix sample_in_ball(Eigen::Index rows, Eigen::Index cols, double radius, std::mt19937_64& rng);

struct Diagnostics {
  BoundsReport bounds;
  std::optional<ConditionReport> general;
  std::optional<ConditionReport> omega;
  std::optional<ConditionReport> constrained;
  std::optional<double> contraction_factor;
  std::vector<std::string> notes;
};

std::string diagnostics_text(const Diagnostics& d);
std::string diagnostics_kv(const Diagnostics& d);

}  // namespace ocrnn
