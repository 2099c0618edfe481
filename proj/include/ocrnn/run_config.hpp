#pragma once

// JSON run configuration:
//
//   { "model": {...}, "data": {...}, "constraints": {...}, "output_dir": "...",
//     "emit_plots": true, "diagnostics": false, "seed": 0, ... }
//
// Relative paths resolve against the directory of the config file.

#include "ocrnn/constraints.hpp"
#include "ocrnn/experiment.hpp"
#include "ocrnn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ocrnn {

struct DataSource {
  std::optional<std::filesystem::path> csv_path;
  std::vector<std::string> x_columns;
  std::string y_column = "y";
  std::optional<PolynomialSpec> generator;
};

struct ConstraintBlock {
  std::optional<std::vector<Eigen::Index>> fnn_layers;
  std::optional<Matrix> N;
  std::optional<Matrix> V0;
  std::optional<Matrix> R;
  std::optional<Vector> r;
};

struct RunConfig {
  ModelConfig model;
  DataSource data;
  std::optional<ConstraintBlock> constraints;
  std::filesystem::path output_dir = "out";
  bool emit_plots = true;
  bool diagnostics = false;
  std::uint64_t seed = 0;
  std::optional<Matrix> omega;      // Omega certificate for the diagnostics
  std::size_t diagnostic_pairs = 50;
  bool sse_log_scale = true;
};

// ConfigError messages name the offending field, e.g. "model.theta_W: ...".
RunConfig parse_run_config(const std::string& json_text,
                           const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

struct LoadedData {
  Dataset data;
  std::vector<std::string> x_columns;
  std::string y_column;
};

LoadedData load_dataset(const RunConfig& config);

// nullopt when the config has no constraints block.
std::optional<ConstraintSet> build_constraint_set(const RunConfig& config, Eigen::Index n_in);

}  // namespace ocrnn
