#pragma once

#include "ocrnn/experiment.hpp"
#include "ocrnn/model.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

using namespace ocrnn;

// 50 points of x^3 + x^2 - 10x on [-5, 5] with a constant column.
inline PolynomialSpec cubic_spec() {
  PolynomialSpec spec;
  spec.coefficients = {1, 1, -10, 0};
  spec.lo = -5;
  spec.hi = 5;
  spec.n_points = 50;
  return spec;
}

inline Dataset cubic_data() { return generate_polynomial_dataset(cubic_spec()); }

inline ModelConfig cubic_config() {
  ModelConfig c;
  c.n_neurons = 3;
  c.theta_W = 1.2;
  c.theta_V = 0.05;
  c.beta = Vector::Ones(3);
  c.b = Vector(3);
  c.b << 0, 1, 2;
  c.activation = ActivationSpec::softplus(0.05);
  c.delta = 0.001;
  c.outer_tol = 1e-3;
  c.max_outer_iters = 20000;
  return c;
}

// One neuron, tiny data and a huge theta_W: well inside the contraction
// regime, so training converges to a unique fixed point quickly.
inline Dataset tiny_data() {
  Dataset d;
  d.X.resize(5, 1);
  d.X << 0.5, -0.3, 0.4, 0.1, -0.6;
  d.Y.resize(5);
  d.Y << 0.2, -0.1, 0.15, 0.05, -0.2;
  return d;
}

inline ModelConfig tiny_config() {
  ModelConfig c;
  c.n_neurons = 1;
  c.theta_W = 1000.0;
  c.theta_V = 0.8;
  c.beta = Vector::Ones(1);
  c.b = Vector::Zero(1);
  c.activation = ActivationSpec::softplus(1.0);
  c.delta = 0.5;
  c.param_delta_metric = DeltaMetric::state;
  c.outer_tol = 1e-24;
  c.max_outer_iters = 5000;
  return c;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ocrnn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
