#include "ocrnn/experiment.hpp"

#include <cmath>

namespace ocrnn {

void PolynomialSpec::validate() const {
  if (coefficients.empty()) throw ConfigError("generator.coefficients: must not be empty");
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw ConfigError("generator.coefficients: non-finite value");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigError("generator.domain: need finite lo < hi");
  }
  if (n_points < 2) throw ConfigError("generator.n_points: need at least 2 points");
}

double eval_polynomial(const std::vector<double>& coefficients, double x) {
  double acc = 0.0;
  for (double c : coefficients) acc = acc * x + c;
  return acc;
}

Vector even_grid(double lo, double hi, Eigen::Index n) {
  Vector g(n);
  const double span = hi - lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i) = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g(n - 1) = hi;
  return g;
}

Dataset generate_polynomial_dataset(const PolynomialSpec& spec) {
  spec.validate();
  const Vector grid = even_grid(spec.lo, spec.hi, spec.n_points);
  const Eigen::Index cols = spec.include_constant_column ? 2 : 1;
  Dataset d;
  d.X.resize(spec.n_points, cols);
  d.Y.resize(spec.n_points);
  for (Eigen::Index i = 0; i < spec.n_points; ++i) {
    if (spec.include_constant_column) d.X(i, 0) = 1.0;
    d.X(i, cols - 1) = grid(i);
    d.Y(i) = eval_polynomial(spec.coefficients, grid(i));
  }
  return d;
}

std::vector<std::string> polynomial_x_columns(const PolynomialSpec& spec) {
  if (spec.include_constant_column) return {"const", "x"};
  return {"x"};
}

}  // namespace ocrnn
