#pragma once

// Dense linear-algebra helpers: operator norms, condition numbers, the
// Woodbury-accelerated shifted inverse, and the coupled Sylvester pair
//
//   X1 = A X2 + B1
//   X2 = -X1 c c' + B2
//
// solved in closed form without assembling the Kronecker system.

#include "ocrnn/types.hpp"

#include <optional>

namespace ocrnn::matrix_kit {

// sigma_min < kSingularRatio * sigma_max is treated as singular.
inline constexpr double kSingularRatio = 1e-12;

double spectral_norm(const Matrix& m);

// Condition number sigma_max / sigma_min; std::nullopt when the matrix is
// singular at the kSingularRatio threshold.
std::optional<double> condition_number(const Matrix& m);

// condition_number() but throws SingularMatrix naming `what` when singular.
double condition_number_or_throw(const Matrix& m, const char* what);

// Applies (I + s X X')^{-1} through the k x k inner system (I + s X'X).
// The inner factorisation is computed once at construction.
class WoodburySolver {
 public:
  WoodburySolver(Matrix x, double s);

  Matrix apply(const Matrix& b) const;

  Eigen::Index rows() const { return x_.rows(); }
  double shift() const { return s_; }

 private:
  Matrix x_;
  double s_;
  Eigen::PartialPivLU<Matrix> inner_;
  bool trivial_ = false;
};

// (I + s X X')^{-1} B, never forming the n x n inverse.
Matrix woodbury_apply(const Matrix& x, double s, const Matrix& b);

struct SylvesterPair {
  Matrix x1;
  Matrix x2;
};

// Closed-form solution of the coupled pair above via
//   X = D - (I + c'c A)^{-1} A D c c'
// with D1 = B1 + A B2 and D2 = B2 - B1 c c'.
SylvesterPair sylvester_pair_solve(const Matrix& a, const Vector& c, const Matrix& b1,
                                   const Matrix& b2);

// Column-major vec / vec^{-1}.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// Moore-Penrose pseudo-inverse with the kSingularRatio cutoff.
Matrix pseudo_inverse(const Matrix& m);

// Orthonormal basis of the column space (numerical rank by kSingularRatio).
Matrix column_basis(const Matrix& m);

}  // namespace ocrnn::matrix_kit
