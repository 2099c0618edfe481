#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ocrnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Base of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, bad parameter value, non-finite input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A matrix that must be inverted is numerically singular.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain where a formula is defined
// (e.g. W outside the semicircle, ||W|| >= 1 for the forward solve).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative method exhausted its iteration budget.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

// The training state became non-finite.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// Bad or missing configuration field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(name) + " contains non-finite entries");
  }
}

inline void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) {
    throw InvalidArgument(std::string(name) + " contains non-finite entries");
  }
}

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace ocrnn
