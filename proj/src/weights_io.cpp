#include "ocrnn/weights_io.hpp"

#include "ocrnn/format.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ocrnn {

using nlohmann::json;

namespace {

// Numbers are written as raw shortest round-trip text so reloads are exact.
std::string num(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("weights file cannot store non-finite values");
  return format_double(v);
}

std::string rows_json(const Matrix& m, const std::string& indent) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += i ? ",\n" + indent + " [" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      out += num(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

std::string vector_json(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v(i));
  }
  return out + "]";
}

Matrix read_rows(const json& v, Eigen::Index rows, Eigen::Index cols, const std::string& field) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
    throw ConfigError(field + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(field + "[" + std::to_string(i) + "]: expected " + std::to_string(cols) +
                        " values");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) throw ConfigError(field + ": non-numeric entry");
      m(i, j) = x.get<double>();
    }
  }
  return m;
}

Vector read_vector(const json& v, Eigen::Index n, const std::string& field) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
    throw ConfigError(field + ": expected " + std::to_string(n) + " values");
  }
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& x = v[static_cast<std::size_t>(i)];
    if (!x.is_number()) throw ConfigError(field + ": non-numeric entry");
    out(i) = x.get<double>();
  }
  return out;
}

}  // namespace

std::string weights_json(const SavedModel& m) {
  const Eigen::Index n = m.weights.W.rows();
  if (m.weights.W.cols() != n || m.weights.V.cols() != n || m.weights.b.size() != n ||
      m.beta.size() != n) {
    throw InvalidArgument("weights_json: inconsistent shapes");
  }
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": " << kWeightsFormatVersion << ",\n";
  os << "  \"n_neurons\": " << n << ",\n";
  os << "  \"n_inputs\": " << m.weights.V.rows() << ",\n";
  os << "  \"theta_W\": " << num(m.theta_W) << ",\n";
  os << "  \"theta_V\": " << num(m.theta_V) << ",\n";
  os << "  \"activation\": [";
  const auto& specs = m.activation.specs();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (i) os << ", ";
    os << "{\"kind\": \"" << to_string(specs[i].kind) << "\", \"alpha\": " << num(specs[i].alpha)
       << "}";
  }
  os << "],\n";
  os << "  \"x_columns\": [";
  for (std::size_t i = 0; i < m.x_columns.size(); ++i) {
    if (i) os << ", ";
    os << json(m.x_columns[i]).dump();
  }
  os << "],\n";
  os << "  \"b\": " << vector_json(m.weights.b) << ",\n";
  os << "  \"beta\": " << vector_json(m.beta) << ",\n";
  os << "  \"W\": " << rows_json(m.weights.W, "       ") << ",\n";
  os << "  \"V\": " << rows_json(m.weights.V, "       ") << "\n";
  os << "}\n";
  return os.str();
}

SavedModel parse_weights_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
  auto need = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) throw ConfigError(source + ": missing field '" + key + "'");
    return *it;
  };
  if (!doc.is_object()) throw ConfigError(source + ": expected an object");
  const json& ver = need("format_version");
  if (!ver.is_number_integer() || ver.get<int>() != kWeightsFormatVersion) {
    throw ConfigError(source + ": format_version: unsupported");
  }
  const json& nj = need("n_neurons");
  const json& ij = need("n_inputs");
  if (!nj.is_number_integer() || nj.get<long long>() < 1 || !ij.is_number_integer() ||
      ij.get<long long>() < 1) {
    throw ConfigError(source + ": n_neurons/n_inputs must be positive integers");
  }
  const auto n = static_cast<Eigen::Index>(nj.get<long long>());
  const auto n_in = static_cast<Eigen::Index>(ij.get<long long>());

  SavedModel m;
  if (!need("theta_W").is_number() || !need("theta_V").is_number()) {
    throw ConfigError(source + ": theta_W/theta_V must be numbers");
  }
  m.theta_W = need("theta_W").get<double>();
  m.theta_V = need("theta_V").get<double>();
  std::vector<ActivationSpec> specs;
  const json& acts = need("activation");
  if (!acts.is_array() || acts.empty()) throw ConfigError(source + ": activation: expected a list");
  try {
    for (const auto& a : acts) {
      ActivationSpec s{activation_kind_from_string(a.at("kind").get<std::string>()),
                       a.at("alpha").get<double>()};
      s.validate();
      specs.push_back(s);
    }
    m.activation = ColumnActivations(std::move(specs));
    m.activation.check_columns(n);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": activation: " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(source + ": activation: " + e.what());
  }
  if (auto it = doc.find("x_columns"); it != doc.end() && it->is_array()) {
    for (const auto& c : *it) {
      if (!c.is_string()) throw ConfigError(source + ": x_columns: expected strings");
      m.x_columns.push_back(c.get<std::string>());
    }
  }
  m.weights.b = read_vector(need("b"), n, source + ": b");
  m.beta = read_vector(need("beta"), n, source + ": beta");
  m.weights.W = read_rows(need("W"), n, n, source + ": W");
  m.weights.V = read_rows(need("V"), n_in, n, source + ": V");
  return m;
}

void save_weights(const std::filesystem::path& path, const SavedModel& m) {
  const std::string text = weights_json(m);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw Error("write failed: " + path.string());
}

SavedModel load_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read weights file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_weights_json(ss.str(), path.string());
}

}  // namespace ocrnn
