#pragma once

// Self-describing weights file for predict-only runs.

#include "ocrnn/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ocrnn {

inline constexpr int kWeightsFormatVersion = 1;

struct SavedModel {
  WeightSet weights;
  Vector beta;
  double theta_W = 0.0;
  double theta_V = 0.0;
  ColumnActivations activation;
  std::vector<std::string> x_columns;
};

std::string weights_json(const SavedModel& m);
SavedModel parse_weights_json(const std::string& text, const std::string& source = "<weights>");

void save_weights(const std::filesystem::path& path, const SavedModel& m);
SavedModel load_weights(const std::filesystem::path& path);

}  // namespace ocrnn
