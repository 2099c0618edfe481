#pragma once

// Polynomial regression data on an even grid.

#include "ocrnn/model.hpp"

#include <string>
#include <vector>

namespace ocrnn {

struct PolynomialSpec {
  std::vector<double> coefficients;  // descending degree
  double lo = -5.0;
  double hi = 5.0;
  Eigen::Index n_points = 50;
  bool include_constant_column = true;

  void validate() const;  // ConfigError
};

double eval_polynomial(const std::vector<double>& coefficients, double x);

// lo, lo + h, ..., hi with the endpoints exact.
Vector even_grid(double lo, double hi, Eigen::Index n);

// X = [1, x] (or [x]), Y = p(x).
Dataset generate_polynomial_dataset(const PolynomialSpec& spec);

// Column names matching generate_polynomial_dataset's X.
std::vector<std::string> polynomial_x_columns(const PolynomialSpec& spec);

}  // namespace ocrnn
