#pragma once

// Activation functions admitted by the method: every registered kind has
// a derivative in [0, 1] everywhere, so F() is 1-Lipschitz.

#include "ocrnn/types.hpp"

#include <string>
#include <vector>

namespace ocrnn {

enum class ActivationKind {
  softplus,  // (1/alpha) ln(1 + e^{alpha u}), derivative sigmoid(alpha u)
  identity,
};

struct ActivationSpec {
  ActivationKind kind = ActivationKind::softplus;
  double alpha = 1.0;  // sharpness; ignored for identity

  void validate() const;

  static ActivationSpec softplus(double alpha) { return {ActivationKind::softplus, alpha}; }
  static ActivationSpec identity() { return {ActivationKind::identity, 1.0}; }

  bool operator==(const ActivationSpec&) const = default;
};

std::string to_string(ActivationKind kind);
ActivationKind activation_kind_from_string(const std::string& name);

double act_eval(const ActivationSpec& spec, double u);
double act_deriv(const ActivationSpec& spec, double u);

// Per-column activation list; a single entry applies to every column.
class ColumnActivations {
 public:
  ColumnActivations() : specs_{ActivationSpec::softplus(1.0)} {}
  ColumnActivations(ActivationSpec single) : specs_{single} {}  // NOLINT(implicit)
  explicit ColumnActivations(std::vector<ActivationSpec> specs);

  const ActivationSpec& at(Eigen::Index column) const;
  const std::vector<ActivationSpec>& specs() const { return specs_; }

  // Throws unless the list is broadcastable to `columns`.
  void check_columns(Eigen::Index columns) const;

  // F(U) and its elementwise derivative matrix.
  Matrix apply(const Matrix& u) const;
  Matrix derivative(const Matrix& u) const;

  bool operator==(const ColumnActivations&) const = default;

 private:
  std::vector<ActivationSpec> specs_;
};

}  // namespace ocrnn
