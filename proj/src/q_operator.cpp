#include "ocrnn/q_operator.hpp"

namespace ocrnn {

QOperator::QOperator(Matrix factor, double theta_V, double shift)
    : factor_(std::move(factor)),
      theta_V_(theta_V),
      shift_(shift),
      inverse_(factor_, shift / theta_V) {
  if (!(theta_V_ > 0.0)) throw InvalidArgument("QOperator: theta_V must be positive");
}

Matrix QOperator::apply(const Matrix& m) const {
  if (m.rows() != factor_.rows()) {
    throw InvalidArgument("QOperator::apply: operand has " + std::to_string(m.rows()) +
                          " rows, Q is " + std::to_string(factor_.rows()) + " square");
  }
  if (factor_.cols() == 0) return Matrix::Zero(m.rows(), m.cols());
  if (factor_.cols() < factor_.rows()) {
    const Matrix inner = factor_.transpose() * m;
    return factor_ * (inner / theta_V_);
  }
  return dense() * m;
}

Matrix QOperator::shifted_inverse_apply(const Matrix& m) const { return inverse_.apply(m); }

Matrix QOperator::dense() const {
  return (factor_ * factor_.transpose()) / theta_V_;
}

double QOperator::norm() const {
  if (factor_.size() == 0) return 0.0;
  const double s = matrix_kit::spectral_norm(factor_);
  return s * s / theta_V_;
}

double QOperator::min_eigenvalue() const {
  if (factor_.cols() < factor_.rows()) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(factor_);
  const double s = svd.singularValues()(factor_.rows() - 1);
  return s * s / theta_V_;
}

}  // namespace ocrnn
