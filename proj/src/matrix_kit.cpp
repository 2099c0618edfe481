#include "ocrnn/matrix_kit.hpp"

#include <cmath>
#include <limits>

namespace ocrnn::matrix_kit {

namespace {

Vector singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace

double spectral_norm(const Matrix& m) {
  require_finite(m, "spectral_norm input");
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

std::optional<double> condition_number(const Matrix& m) {
  require_finite(m, "condition_number input");
  if (m.rows() != m.cols()) {
    throw InvalidArgument("condition_number needs a square matrix, got " + shape_str(m));
  }
  if (m.size() == 0) {
    throw InvalidArgument("condition_number of an empty matrix");
  }
  const Vector sv = singular_values(m);
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smax == 0.0 || smin < kSingularRatio * smax) return std::nullopt;
  return smax / smin;
}

double condition_number_or_throw(const Matrix& m, const char* what) {
  auto k = condition_number(m);
  if (!k) throw SingularMatrix(std::string(what) + " is numerically singular");
  return *k;
}

WoodburySolver::WoodburySolver(Matrix x, double s) : x_(std::move(x)), s_(s) {
  require_finite(x_, "woodbury X");
  if (!std::isfinite(s_)) throw InvalidArgument("woodbury shift is not finite");
  if (x_.cols() == 0 || s_ == 0.0) {
    trivial_ = true;
    return;
  }
  Matrix inner = Matrix::Identity(x_.cols(), x_.cols());
  inner.noalias() += s_ * (x_.transpose() * x_);
  if (!condition_number(inner)) {
    throw SingularMatrix("woodbury inner matrix (I + s X'X) is numerically singular");
  }
  inner_.compute(inner);
}

Matrix WoodburySolver::apply(const Matrix& b) const {
  if (b.rows() != x_.rows()) {
    throw InvalidArgument("woodbury_apply: B has " + std::to_string(b.rows()) +
                          " rows, X has " + std::to_string(x_.rows()));
  }
  if (trivial_) return b;
  const Matrix xtb = x_.transpose() * b;
  return b - s_ * (x_ * inner_.solve(xtb));
}

Matrix woodbury_apply(const Matrix& x, double s, const Matrix& b) {
  return WoodburySolver(x, s).apply(b);
}

SylvesterPair sylvester_pair_solve(const Matrix& a, const Vector& c, const Matrix& b1,
                                   const Matrix& b2) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = c.size();
  if (a.cols() != n) throw InvalidArgument("sylvester_pair_solve: A must be square");
  if (b1.rows() != n || b1.cols() != m || b2.rows() != n || b2.cols() != m) {
    throw InvalidArgument("sylvester_pair_solve: B1/B2 must be " + std::to_string(n) + "x" +
                          std::to_string(m) + ", got " + shape_str(b1) + " and " +
                          shape_str(b2));
  }
  require_finite(a, "A");
  require_finite(c, "c");
  require_finite(b1, "B1");
  require_finite(b2, "B2");

  const double ctc = c.squaredNorm();
  Matrix shifted = Matrix::Identity(n, n) + ctc * a;
  if (!condition_number(shifted)) {
    throw SingularMatrix("sylvester_pair_solve: (I + c'c A) is numerically singular");
  }
  const Matrix k = shifted.partialPivLu().solve(a);

  Matrix d1 = b1 + a * b2;
  Matrix d2 = b2 - (b1 * c) * c.transpose();
  SylvesterPair out;
  out.x1 = d1 - (k * (d1 * c)) * c.transpose();
  out.x2 = d2 - (k * (d2 * c)) * c.transpose();
  return out;
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidArgument("unvec: length " + std::to_string(v.size()) + " does not match " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix pseudo_inverse(const Matrix& m) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = kSingularRatio * sv(0);
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix column_basis(const Matrix& m) {
  if (m.size() == 0) return Matrix::Zero(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kSingularRatio * sv(0) && sv(i) > 0.0) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace ocrnn::matrix_kit
