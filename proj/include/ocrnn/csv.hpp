#pragma once

// Numeric CSV with a header row. Values use the shortest round-trip
// representation, '.' as decimal point and LF line endings.

#include "ocrnn/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ocrnn {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;  // rows x header.size()

  // Index of a named column; ConfigError naming the column when missing.
  Eigen::Index column(const std::string& name) const;
};

std::string csv_text(const std::vector<std::string>& header, const Matrix& values);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values);

CsvTable parse_csv(const std::string& text, const std::string& source = "<csv>");
CsvTable read_csv(const std::filesystem::path& path);

// Single-column trace with a 1-based iteration index.
void write_trace_csv(const std::filesystem::path& path, const std::string& name,
                     const std::vector<double>& trace);

Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& x_columns,
                           const std::string& y_column);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const std::vector<std::string>& x_columns, const std::string& y_column);

}  // namespace ocrnn
