#include "ocrnn/run_config.hpp"

#include "ocrnn/csv.hpp"

#include <json.hpp>

#include <fstream>
#include <numeric>
#include <sstream>

namespace ocrnn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(field, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

Vector get_vector(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = get_number(v[i], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

// Scalars broadcast to `n` entries.
Vector get_vector_or_scalar(const json& v, Eigen::Index n, const std::string& field) {
  if (v.is_number()) return Vector::Constant(n, v.get<double>());
  Vector out = get_vector(v, field);
  if (out.size() != n) {
    fail(field, "expected " + std::to_string(n) + " entries, got " + std::to_string(out.size()));
  }
  return out;
}

Matrix get_matrix(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of rows");
  if (v.empty()) return Matrix(0, 0);
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols) fail(row_field, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          get_number(v[i][j], row_field + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

ActivationSpec parse_activation(const json& v, const std::string& field) {
  ActivationSpec spec = ActivationSpec::softplus(1.0);
  if (v.is_string()) {
    try {
      spec.kind = activation_kind_from_string(v.get<std::string>());
    } catch (const Error& e) {
      fail(field, e.what());
    }
    return spec;
  }
  if (!v.is_object()) fail(field, "expected an object {\"kind\", \"alpha\"}");
  if (auto* k = find(v, "kind")) {
    try {
      spec.kind = activation_kind_from_string(get_string(*k, field + ".kind"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(field + ".kind", e.what());
    }
  }
  if (auto* a = find(v, "alpha")) spec.alpha = get_number(*a, field + ".alpha");
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(field, e.what());
  }
  return spec;
}

ModelConfig parse_model(const json& m) {
  if (!m.is_object()) fail("model", "expected an object");
  ModelConfig c;
  const json* n = find(m, "n_neurons");
  if (!n) fail("model.n_neurons", "required");
  c.n_neurons = static_cast<Eigen::Index>(get_count(*n, "model.n_neurons"));
  if (c.n_neurons < 1) fail("model.n_neurons", "must be at least 1");
  if (auto* v = find(m, "theta_W")) c.theta_W = get_number(*v, "model.theta_W");
  if (auto* v = find(m, "theta_V")) c.theta_V = get_number(*v, "model.theta_V");
  c.beta = Vector::Ones(c.n_neurons);
  if (auto* v = find(m, "beta")) c.beta = get_vector_or_scalar(*v, c.n_neurons, "model.beta");
  c.b = Vector::Zero(c.n_neurons);
  if (auto* v = find(m, "b")) c.b = get_vector_or_scalar(*v, c.n_neurons, "model.b");
  if (auto* v = find(m, "activation")) {
    std::vector<ActivationSpec> specs;
    if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        specs.push_back(parse_activation((*v)[i], "model.activation[" + std::to_string(i) + "]"));
      }
    } else {
      specs.push_back(parse_activation(*v, "model.activation"));
    }
    c.activation = ColumnActivations(std::move(specs));
  }
  if (auto* v = find(m, "delta")) c.delta = get_number(*v, "model.delta");
  if (auto* v = find(m, "max_outer_iters")) c.max_outer_iters = get_count(*v, "model.max_outer_iters");
  if (auto* v = find(m, "outer_tol")) c.outer_tol = get_number(*v, "model.outer_tol");
  if (auto* v = find(m, "inner_tol")) c.inner_tol = get_number(*v, "model.inner_tol");
  if (auto* v = find(m, "inner_max_iters")) c.inner_max_iters = get_count(*v, "model.inner_max_iters");
  if (auto* v = find(m, "param_delta_metric")) {
    const std::string s = get_string(*v, "model.param_delta_metric");
    if (s == "weights") {
      c.param_delta_metric = DeltaMetric::weights;
    } else if (s == "state") {
      c.param_delta_metric = DeltaMetric::state;
    } else {
      fail("model.param_delta_metric", "expected \"weights\" or \"state\", got \"" + s + "\"");
    }
  }
  if (auto* v = find(m, "halve_delta_on_divergence")) {
    c.halve_delta_on_divergence = get_bool(*v, "model.halve_delta_on_divergence");
  }
  c.validate();
  return c;
}

PolynomialSpec parse_generator(const json& g) {
  if (!g.is_object()) fail("data.generator", "expected an object");
  PolynomialSpec p;
  const json* coeffs = find(g, "coefficients");
  if (!coeffs) fail("data.generator.coefficients", "required");
  const Vector cv = get_vector(*coeffs, "data.generator.coefficients");
  p.coefficients.assign(cv.data(), cv.data() + cv.size());
  if (auto* d = find(g, "domain")) {
    const Vector dom = get_vector(*d, "data.generator.domain");
    if (dom.size() != 2) fail("data.generator.domain", "expected [lo, hi]");
    p.lo = dom(0);
    p.hi = dom(1);
  }
  if (auto* n = find(g, "n_points")) {
    p.n_points = static_cast<Eigen::Index>(get_count(*n, "data.generator.n_points"));
  }
  if (auto* c = find(g, "include_constant_column")) {
    p.include_constant_column = get_bool(*c, "data.generator.include_constant_column");
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("data.") + e.what());
  }
  return p;
}

DataSource parse_data(const json& d, const std::filesystem::path& base_dir) {
  if (!d.is_object()) fail("data", "expected an object");
  DataSource s;
  const json* gen = find(d, "generator");
  const json* csv = find(d, "csv_path");
  if (gen && csv) fail("data", "give either csv_path or generator, not both");
  if (!gen && !csv) fail("data", "needs csv_path or generator");
  if (gen) {
    s.generator = parse_generator(*gen);
    s.x_columns = polynomial_x_columns(*s.generator);
  } else {
    std::filesystem::path p = get_string(*csv, "data.csv_path");
    s.csv_path = p.is_absolute() ? p : base_dir / p;
    const json* xc = find(d, "x_columns");
    if (!xc || !xc->is_array() || xc->empty()) {
      fail("data.x_columns", "expected a nonempty array of column names");
    }
    for (std::size_t i = 0; i < xc->size(); ++i) {
      s.x_columns.push_back(get_string((*xc)[i], "data.x_columns[" + std::to_string(i) + "]"));
    }
  }
  if (auto* y = find(d, "y_column")) s.y_column = get_string(*y, "data.y_column");
  return s;
}

ConstraintBlock parse_constraints(const json& c) {
  if (!c.is_object()) fail("constraints", "expected an object");
  ConstraintBlock b;
  if (auto* f = find(c, "fnn_layers")) {
    if (!f->is_array() || f->empty()) fail("constraints.fnn_layers", "expected a nonempty array");
    std::vector<Eigen::Index> layers;
    for (std::size_t i = 0; i < f->size(); ++i) {
      const auto n = get_count((*f)[i], "constraints.fnn_layers[" + std::to_string(i) + "]");
      if (n == 0) fail("constraints.fnn_layers[" + std::to_string(i) + "]", "must be positive");
      layers.push_back(static_cast<Eigen::Index>(n));
    }
    b.fnn_layers = std::move(layers);
  }
  if (auto* v = find(c, "N")) b.N = get_matrix(*v, "constraints.N");
  if (auto* v = find(c, "V0")) b.V0 = get_matrix(*v, "constraints.V0");
  if (auto* v = find(c, "R")) b.R = get_matrix(*v, "constraints.R");
  if (auto* v = find(c, "r")) b.r = get_vector(*v, "constraints.r");
  if (b.fnn_layers && (b.R || b.r)) fail("constraints", "fnn_layers and R/r are exclusive");
  if (b.R.has_value() != b.r.has_value()) fail("constraints", "R and r must be given together");
  return b;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config", "top level must be an object");
  RunConfig rc;
  const json* model = find(doc, "model");
  if (!model) fail("model", "required");
  rc.model = parse_model(*model);
  const json* data = find(doc, "data");
  if (!data) fail("data", "required");
  rc.data = parse_data(*data, base_dir);
  if (auto* c = find(doc, "constraints"); c && !c->is_null()) rc.constraints = parse_constraints(*c);
  if (auto* v = find(doc, "output_dir")) {
    std::filesystem::path p = get_string(*v, "output_dir");
    rc.output_dir = p.is_absolute() ? p : base_dir / p;
  } else {
    rc.output_dir = base_dir / "out";
  }
  if (auto* v = find(doc, "emit_plots")) rc.emit_plots = get_bool(*v, "emit_plots");
  if (auto* v = find(doc, "diagnostics")) rc.diagnostics = get_bool(*v, "diagnostics");
  if (auto* v = find(doc, "seed")) rc.seed = static_cast<std::uint64_t>(get_count(*v, "seed"));
  if (auto* v = find(doc, "omega"); v && !v->is_null()) {
    rc.omega = get_matrix(*v, "omega");
    if (rc.omega->rows() != rc.model.n_neurons || rc.omega->cols() != rc.model.n_neurons) {
      fail("omega", "must be n_neurons x n_neurons");
    }
  }
  if (auto* v = find(doc, "diagnostic_pairs")) {
    rc.diagnostic_pairs = get_count(*v, "diagnostic_pairs");
    if (rc.diagnostic_pairs == 0) fail("diagnostic_pairs", "must be at least 1");
  }
  if (auto* v = find(doc, "sse_log_scale")) rc.sse_log_scale = get_bool(*v, "sse_log_scale");

  try {
    rc.model.activation.check_columns(rc.model.n_neurons);
  } catch (const Error& e) {
    fail("model.activation", e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

LoadedData load_dataset(const RunConfig& config) {
  LoadedData out;
  out.x_columns = config.data.x_columns;
  out.y_column = config.data.y_column;
  if (config.data.generator) {
    out.data = generate_polynomial_dataset(*config.data.generator);
  } else {
    const auto& path = *config.data.csv_path;
    if (!std::filesystem::exists(path)) {
      throw ConfigError("data.csv_path: file not found: " + path.string());
    }
    try {
      out.data = dataset_from_table(read_csv(path), out.x_columns, out.y_column);
    } catch (const ConfigError& e) {
      throw ConfigError("data.csv_path (" + path.string() + "): " + e.what());
    }
  }
  try {
    out.data.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("data: ") + e.what());
  }
  return out;
}

std::optional<ConstraintSet> build_constraint_set(const RunConfig& config, Eigen::Index n_in) {
  if (!config.constraints) return std::nullopt;
  const auto& c = *config.constraints;
  const Eigen::Index n = config.model.n_neurons;
  Matrix R(0, n * n);
  Vector r(0);
  if (c.fnn_layers) {
    const Eigen::Index total =
        std::accumulate(c.fnn_layers->begin(), c.fnn_layers->end(), Eigen::Index{0});
    if (total != n) {
      fail("constraints.fnn_layers", "layer sizes sum to " + std::to_string(total) +
                                         " but model.n_neurons is " + std::to_string(n));
    }
    auto mask = fnn_mask_constraints(*c.fnn_layers);
    R = std::move(mask.R);
    r = std::move(mask.r);
  } else if (c.R) {
    R = *c.R;
    r = *c.r;
    if (R.rows() == 0) R.resize(0, n * n);
  }
  Matrix V0 = c.V0 ? *c.V0 : Matrix::Zero(n_in, n);
  try {
    return build_constraints(c.N, std::move(V0), std::move(R), std::move(r), config.model.theta_W);
  } catch (const Error& e) {
    fail("constraints", e.what());
  }
}

}  // namespace ocrnn
