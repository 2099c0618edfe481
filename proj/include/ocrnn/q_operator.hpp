#pragma once

#include "ocrnn/matrix_kit.hpp"
#include "ocrnn/types.hpp"

namespace ocrnn {

// Q = (1/theta_V) Z Z', where Z = X for the free model and Z = X N_o (N_o an
// orthonormal basis of col(N)) for a constrained V. Applications never form
// the n_obs x n_obs product unless Z has at least as many columns as rows.
// The Woodbury factorisation of (I + shift Q) is built once.
class QOperator {
 public:
  QOperator(Matrix factor, double theta_V, double shift);

  Matrix apply(const Matrix& m) const;

  // (I + shift Q)^{-1} M.
  Matrix shifted_inverse_apply(const Matrix& m) const;

  Matrix dense() const;
  double norm() const;  // spectral norm of Q
  double min_eigenvalue() const;  // zero whenever Z has fewer columns than rows

  const Matrix& factor() const { return factor_; }
  double theta_V() const { return theta_V_; }
  double shift() const { return shift_; }
  Eigen::Index size() const { return factor_.rows(); }

 private:
  Matrix factor_;
  double theta_V_;
  double shift_;
  matrix_kit::WoodburySolver inverse_;
};

}  // namespace ocrnn
