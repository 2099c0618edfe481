#include "ocrnn/constraints.hpp"

#include "ocrnn/foc_solver.hpp"
#include "ocrnn/matrix_kit.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace ocrnn {

namespace mk = matrix_kit;

ConstraintSet::ConstraintSet(std::optional<Matrix> N, Matrix V0, Matrix R, Vector r,
                             std::optional<double> theta_W)
    : N_(std::move(N)), V0_(std::move(V0)), R_(std::move(R)), r_(std::move(r)) {
  const Eigen::Index n = V0_.cols();
  const Eigen::Index n_in = V0_.rows();
  const Eigen::Index nn = n * n;
  if (n < 1 || n_in < 1) throw InvalidArgument("constraints: V0 must be n_in x n_neurons");
  require_finite(V0_, "V0");
  if (N_) {
    if (N_->rows() != n_in) {
      throw InvalidArgument("constraints: N must have " + std::to_string(n_in) +
                            " rows, got " + shape_str(*N_));
    }
    require_finite(*N_, "N");
  }
  if (R_.cols() != nn) {
    throw InvalidArgument("constraints: R must have n_neurons^2 = " + std::to_string(nn) +
                          " columns, got " + shape_str(R_));
  }
  if (r_.size() != R_.rows()) throw InvalidArgument("constraints: r length must equal rows of R");
  require_finite(R_, "R");
  require_finite(r_, "r");

  if (R_.rows() == 0) {
    P_ = Matrix::Identity(nn, nn);
    W2_ = Matrix::Zero(n, n);
  } else {
    if (R_.rows() > nn) throw InvalidArgument("constraints: R has more rows than columns");
    Eigen::JacobiSVD<Matrix> svd(R_);
    const Vector& sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(sv.size() - 1) < mk::kSingularRatio * sv(0)) {
      throw InvalidArgument("constraints: R does not have full row rank");
    }
    const Matrix rrt = R_ * R_.transpose();
    Eigen::LLT<Matrix> llt(rrt);
    const Matrix rrt_inv_r = llt.solve(R_);  // (RR')^{-1} R
    P_ = Matrix::Identity(nn, nn) - R_.transpose() * rrt_inv_r;
    W2_ = mk::unvec(R_.transpose() * llt.solve(r_), n, n);
  }

  if ((P_ * P_ - P_).cwiseAbs().maxCoeff() > 1e-10 ||
      (P_ - P_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("constraints: projector failed idempotence/symmetry check");
  }
  if (R_.rows() > 0 &&
      (R_ * mk::vec(W2_) - r_).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, r_.norm())) {
    throw InvalidArgument("constraints: particular solution does not satisfy R vec(W2) = r");
  }
  w2_norm_ = W2_.norm();

  if (!N_) {
    n_basis_ = Matrix::Identity(n_in, n_in);
    n_projector_ = Matrix::Identity(n_in, n_in);
  } else {
    n_basis_ = mk::column_basis(*N_);
    n_projector_ = *N_ * mk::pseudo_inverse(*N_);
  }

  if (theta_W && !feasible(*theta_W)) {
    warnings_.push_back("||W2||_F = " + std::to_string(w2_norm_) + " is not below 1/theta_W = " +
                        std::to_string(1.0 / *theta_W) + ": constrained W is undefined");
  }
}

ConstraintSet ConstraintSet::empty(Eigen::Index n_in, Eigen::Index n_neurons) {
  return ConstraintSet(std::nullopt, Matrix::Zero(n_in, n_neurons),
                       Matrix::Zero(0, n_neurons * n_neurons), Vector::Zero(0));
}

ConstrainedWParts constrained_W_parts(const Matrix& U, const Matrix& mu, double theta_W,
                                      const ConstraintSet& cs,
                                      const ColumnActivations& activation) {
  if (!cs.feasible(theta_W)) {
    throw DomainError("constrained_W: ||W2||_F >= 1/theta_W, no admissible W exists");
  }
  const Eigen::Index n = cs.n_neurons();
  if (U.cols() != n || mu.cols() != n || U.rows() != mu.rows()) {
    throw InvalidArgument("constrained_W: U/mu shapes do not match the constraint set");
  }
  const Matrix G = activation.apply(U).transpose() * mu;
  ConstrainedWParts out;
  out.W1 = cs.w_unconstrained() ? G : mk::unvec(cs.P() * mk::vec(G), n, n);
  out.W2 = cs.W2();
  const double a = out.W1.squaredNorm();
  const double c = out.W2.squaredNorm();
  const double scale = std::sqrt(1.0 - theta_W * theta_W * c) / (theta_W * std::sqrt(1.0 + a));
  out.W = scale * out.W1 + out.W2;
  return out;
}

Matrix constrained_W(const Matrix& U, const Matrix& mu, double theta_W, const ConstraintSet& cs,
                     const ColumnActivations& activation) {
  return constrained_W_parts(U, mu, theta_W, cs, activation).W;
}

ConstrainedAssembly constrained_assemble(const Matrix& U, const Matrix& mu, const Matrix& W,
                                         const Dataset& data, const ModelConfig& config,
                                         const ConstraintSet& cs) {
  if (cs.n_in() != data.n_in() || cs.n_neurons() != config.n_neurons) {
    throw InvalidArgument("constrained_assemble: constraint set dimensions do not match model");
  }
  auto [B1, B2] = assemble_B(U, mu, W, config.b, data.Y, config.beta, config.activation);
  if (!cs.n_is_identity()) {
    const Eigen::Index n_in = cs.n_in();
    B1 += data.X * ((Matrix::Identity(n_in, n_in) - cs.n_projector()) * cs.V0());
  }
  Matrix factor = cs.n_is_identity() ? data.X : Matrix(data.X * cs.n_basis());
  return ConstrainedAssembly{std::move(B1), std::move(B2),
                             QOperator(std::move(factor), config.theta_V,
                                       config.beta.squaredNorm())};
}

MaskConstraints fnn_mask_constraints(const std::vector<Eigen::Index>& layer_sizes) {
  if (layer_sizes.empty()) throw InvalidArgument("fnn mask: at least one layer is required");
  for (auto s : layer_sizes) {
    if (s < 1) throw InvalidArgument("fnn mask: layer sizes must be positive");
  }
  const Eigen::Index n =
      std::accumulate(layer_sizes.begin(), layer_sizes.end(), Eigen::Index{0});
  std::vector<Eigen::Index> layer_of(static_cast<std::size_t>(n));
  {
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
      for (Eigen::Index i = 0; i < layer_sizes[l]; ++i) layer_of[static_cast<std::size_t>(k++)] =
          static_cast<Eigen::Index>(l);
    }
  }
  std::vector<Eigen::Index> pinned;  // column-major vec indices
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool free_edge = layer_of[static_cast<std::size_t>(j)] ==
                             layer_of[static_cast<std::size_t>(i)] + 1;
      if (!free_edge) pinned.push_back(i + j * n);
    }
  }
  MaskConstraints out;
  out.R = Matrix::Zero(static_cast<Eigen::Index>(pinned.size()), n * n);
  for (std::size_t row = 0; row < pinned.size(); ++row) {
    out.R(static_cast<Eigen::Index>(row), pinned[row]) = 1.0;
  }
  out.r = Vector::Zero(out.R.rows());
  return out;
}

OmegaReport verify_omega(const Matrix& omega, const Matrix& W) {
  if (omega.rows() != omega.cols() || W.rows() != W.cols() || omega.rows() != W.rows()) {
    throw InvalidArgument("verify_omega: Omega and W must be square of equal size");
  }
  OmegaReport rep;
  const auto k = mk::condition_number(omega);
  rep.invertible = k.has_value();
  rep.kappa = k.value_or(std::numeric_limits<double>::infinity());
  rep.left_ok = (omega * W).minCoeff() >= kNonnegTolerance;
  rep.right_ok = (W * omega).minCoeff() >= kNonnegTolerance;
  return rep;
}

Matrix recover_V_constrained(const Matrix& X, const Matrix& mu, double theta_V,
                             const ConstraintSet& cs) {
  if (X.cols() != cs.n_in() || mu.cols() != cs.n_neurons() || X.rows() != mu.rows()) {
    throw InvalidArgument("recover_V_constrained: shapes do not match the constraint set");
  }
  const Matrix target = X.transpose() * mu / theta_V - cs.V0();
  if (cs.n_is_identity()) return target + cs.V0();
  const Matrix& N = *cs.N();
  const Matrix Vr = mk::pseudo_inverse(N) * target;
  return N * Vr + cs.V0();
}

}  // namespace ocrnn
