#include "ocrnn/csv.hpp"

#include "ocrnn/format.hpp"

#include <charconv>
#include <limits>
#include <fstream>
#include <sstream>

namespace ocrnn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(where + ": not a number: '" + s + "'");
  }
  return v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw Error("write failed: " + path.string());
}

}  // namespace

Eigen::Index CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<Eigen::Index>(i);
  }
  throw ConfigError("column '" + name + "' not found in CSV header");
}

std::string csv_text(const std::vector<std::string>& header, const Matrix& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw InvalidArgument("csv: header has " + std::to_string(header.size()) +
                          " names for " + std::to_string(values.cols()) + " columns");
  }
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values) {
  write_text(path, csv_text(header, values));
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  std::string line;
  CsvTable t;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, source + ":" + std::to_string(line_no)));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError(source + ": empty CSV");
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read CSV file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_csv(ss.str(), path.string());
}

void write_trace_csv(const std::filesystem::path& path, const std::string& name,
                     const std::vector<double>& trace) {
  Matrix m(static_cast<Eigen::Index>(trace.size()), 2);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i + 1);
    m(static_cast<Eigen::Index>(i), 1) = trace[i];
  }
  write_csv(path, {"iteration", name}, m);
}

Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& x_columns,
                           const std::string& y_column) {
  if (x_columns.empty()) throw ConfigError("data.x_columns: must name at least one column");
  Dataset d;
  d.X.resize(table.values.rows(), static_cast<Eigen::Index>(x_columns.size()));
  for (std::size_t j = 0; j < x_columns.size(); ++j) {
    d.X.col(static_cast<Eigen::Index>(j)) = table.values.col(table.column(x_columns[j]));
  }
  d.Y = table.values.col(table.column(y_column));
  return d;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const std::vector<std::string>& x_columns, const std::string& y_column) {
  if (static_cast<Eigen::Index>(x_columns.size()) != data.n_in()) {
    throw InvalidArgument("write_dataset_csv: column names do not match X");
  }
  Matrix m(data.n_obs(), data.n_in() + 1);
  m << data.X, data.Y;
  auto header = x_columns;
  header.push_back(y_column);
  write_csv(path, header, m);
}

}  // namespace ocrnn
