#pragma once

// Linear constraints on the weights:
//
//   V = N V_r + V0        (V restricted to a translated column space of N)
//   R vec(W) = r          (linear system on the column-major vec of W)
//
// P = I - R'(RR')^{-1}R projects vec(W) onto the null space of R and
// W2 = vec^{-1}(R'(RR')^{-1} r) is the minimum-norm particular solution.

#include "ocrnn/activation.hpp"
#include "ocrnn/model.hpp"
#include "ocrnn/q_operator.hpp"
#include "ocrnn/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ocrnn {

class ConstraintSet {
 public:
  // std::nullopt for N means N = I (V unconstrained apart from V0).
  ConstraintSet(std::optional<Matrix> N, Matrix V0, Matrix R, Vector r,
                std::optional<double> theta_W = std::nullopt);

  // R with zero rows, N = I, V0 = 0.
  static ConstraintSet empty(Eigen::Index n_in, Eigen::Index n_neurons);

  Eigen::Index n_in() const { return V0_.rows(); }
  Eigen::Index n_neurons() const { return V0_.cols(); }

  bool n_is_identity() const { return !N_.has_value(); }
  const std::optional<Matrix>& N() const { return N_; }
  const Matrix& V0() const { return V0_; }
  const Matrix& R() const { return R_; }
  const Vector& r() const { return r_; }
  const Matrix& P() const { return P_; }
  const Matrix& W2() const { return W2_; }

  // Orthonormal basis of col(N) and the projector onto it.
  const Matrix& n_basis() const { return n_basis_; }
  const Matrix& n_projector() const { return n_projector_; }

  double w2_norm() const { return w2_norm_; }
  bool feasible(double theta_W) const { return w2_norm_ < 1.0 / theta_W; }
  bool w_unconstrained() const { return R_.rows() == 0; }

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::optional<Matrix> N_;
  Matrix V0_;
  Matrix R_;
  Vector r_;
  Matrix P_;
  Matrix W2_;
  Matrix n_basis_;
  Matrix n_projector_;
  double w2_norm_ = 0.0;
  std::vector<std::string> warnings_;
};

inline ConstraintSet build_constraints(std::optional<Matrix> N, Matrix V0, Matrix R, Vector r,
                                       std::optional<double> theta_W = std::nullopt) {
  return ConstraintSet(std::move(N), std::move(V0), std::move(R), std::move(r), theta_W);
}

// W = (1/theta_W) sqrt((1 - theta_W^2 ||W2||_F^2) / (1 + ||W1||_F^2)) W1 + W2,
// W1 = vec^{-1}(P vec(F(U)'mu)). Throws DomainError if cs is infeasible.
Matrix constrained_W(const Matrix& U, const Matrix& mu, double theta_W, const ConstraintSet& cs,
                     const ColumnActivations& activation);

// Same, also returning the two orthogonal pieces.
struct ConstrainedWParts {
  Matrix W;
  Matrix W1;
  Matrix W2;
};
ConstrainedWParts constrained_W_parts(const Matrix& U, const Matrix& mu, double theta_W,
                                      const ConstraintSet& cs,
                                      const ColumnActivations& activation);

struct ConstrainedAssembly {
  Matrix B1;
  Matrix B2;
  QOperator Q;
};

// Q^ = (1/theta_V) X P_N X', B^1 = X (I - P_N) V0 + 1b' + F(U) W,
// B^2 = Y beta' + F'(U) o (mu W').
ConstrainedAssembly constrained_assemble(const Matrix& U, const Matrix& mu, const Matrix& W,
                                         const Dataset& data, const ModelConfig& config,
                                         const ConstraintSet& cs);

struct MaskConstraints {
  Matrix R;
  Vector r;
};

// Pins every W entry to zero except (i, j) with neuron i in layer l and
// neuron j in layer l + 1, neurons numbered layer by layer.
MaskConstraints fnn_mask_constraints(const std::vector<Eigen::Index>& layer_sizes);

struct OmegaReport {
  bool invertible = false;
  bool left_ok = false;   // Omega W >= 0 entrywise
  bool right_ok = false;  // W Omega >= 0 entrywise
  double kappa = 0.0;     // +inf when singular
};

inline constexpr double kNonnegTolerance = -1e-12;

OmegaReport verify_omega(const Matrix& omega, const Matrix& W);

// V = N V_r + V0 with V_r the least-squares solution of
// theta_V N'(N V_r + V0) = N' X' mu.
Matrix recover_V_constrained(const Matrix& X, const Matrix& mu, double theta_V,
                             const ConstraintSet& cs);

}  // namespace ocrnn
