#include "ocrnn/activation.hpp"

#include <cmath>

namespace ocrnn {

void ActivationSpec::validate() const {
  if (kind == ActivationKind::softplus && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw InvalidArgument("softplus alpha must be positive and finite, got " +
                          std::to_string(alpha));
  }
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::softplus:
      return "softplus";
    case ActivationKind::identity:
      return "identity";
  }
  return "unknown";
}

ActivationKind activation_kind_from_string(const std::string& name) {
  if (name == "softplus") return ActivationKind::softplus;
  if (name == "identity") return ActivationKind::identity;
  throw InvalidArgument("unknown activation kind '" + name + "'");
}

double act_eval(const ActivationSpec& spec, double u) {
  spec.validate();
  switch (spec.kind) {
    case ActivationKind::identity:
      return u;
    case ActivationKind::softplus: {
      const double z = spec.alpha * u;
      if (z > 0.0) return u + std::log1p(std::exp(-z)) / spec.alpha;
      return std::log1p(std::exp(z)) / spec.alpha;
    }
  }
  return u;
}

double act_deriv(const ActivationSpec& spec, double u) {
  spec.validate();
  switch (spec.kind) {
    case ActivationKind::identity:
      return 1.0;
    case ActivationKind::softplus: {
      const double z = spec.alpha * u;
      if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
      const double e = std::exp(z);
      return e / (1.0 + e);
    }
  }
  return 1.0;
}

ColumnActivations::ColumnActivations(std::vector<ActivationSpec> specs)
    : specs_(std::move(specs)) {
  if (specs_.empty()) throw InvalidArgument("activation list is empty");
  for (const auto& s : specs_) s.validate();
}

const ActivationSpec& ColumnActivations::at(Eigen::Index column) const {
  if (specs_.size() == 1) return specs_.front();
  return specs_.at(static_cast<std::size_t>(column));
}

void ColumnActivations::check_columns(Eigen::Index columns) const {
  if (specs_.size() != 1 && static_cast<Eigen::Index>(specs_.size()) != columns) {
    throw InvalidArgument("activation list has " + std::to_string(specs_.size()) +
                          " entries for " + std::to_string(columns) + " neurons");
  }
}

Matrix ColumnActivations::apply(const Matrix& u) const {
  check_columns(u.cols());
  Matrix out(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const auto& spec = at(j);
    for (Eigen::Index i = 0; i < u.rows(); ++i) out(i, j) = act_eval(spec, u(i, j));
  }
  return out;
}

Matrix ColumnActivations::derivative(const Matrix& u) const {
  check_columns(u.cols());
  Matrix out(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const auto& spec = at(j);
    for (Eigen::Index i = 0; i < u.rows(); ++i) out(i, j) = act_deriv(spec, u(i, j));
  }
  return out;
}

}  // namespace ocrnn
