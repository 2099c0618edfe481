#include "ocrnn/cli.hpp"

#include "ocrnn/convergence.hpp"
#include "ocrnn/csv.hpp"
#include "ocrnn/foc_solver.hpp"
#include "ocrnn/format.hpp"
#include "ocrnn/plots.hpp"
#include "ocrnn/run_config.hpp"
#include "ocrnn/weights_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace ocrnn {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw Error("write failed: " + path.string());
}

fs::path prepare_output_dir(const RunConfig& rc, const CliOptions& opts) {
  const fs::path dir = opts.output_dir ? *opts.output_dir : rc.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output_dir: cannot create " + dir.string());
  }
  return dir;
}

// The column used as the horizontal axis of the fit plot: the first
// non-constant input, else the row index.
Vector plot_axis(const Matrix& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if ((X.col(j).array() != X(0, j)).any()) return X.col(j);
  }
  return Vector::LinSpaced(X.rows(), 1.0, static_cast<double>(X.rows()));
}

Diagnostics run_diagnostics(const RunConfig& rc, const Dataset& data,
                            const std::optional<ConstraintSet>& cs,
                            const std::optional<Matrix>& trained_W) {
  Diagnostics d;
  d.bounds = variable_bounds(data, rc.model);
  try {
    d.general = general_condition_report(data, rc.model);
  } catch (const Error& e) {
    d.notes.emplace_back(std::string("general condition unavailable: ") + e.what());
  }
  if (rc.omega) {
    try {
      d.omega = omega_condition_report(data, rc.model, *rc.omega, trained_W);
    } catch (const Error& e) {
      d.notes.emplace_back(std::string("Omega condition unavailable: ") + e.what());
    }
  }
  if (cs) {
    try {
      d.constrained = constrained_condition_report(data, rc.model, *cs, rc.omega);
    } catch (const Error& e) {
      d.notes.emplace_back(std::string("constrained condition unavailable: ") + e.what());
    }
  }
  try {
    d.contraction_factor = empirical_contraction_factor(data, rc.model, cs ? &*cs : nullptr,
                                                        rc.diagnostic_pairs, rc.seed);
  } catch (const Error& e) {
    d.notes.emplace_back(std::string("contraction factor unavailable: ") + e.what());
  }
  return d;
}

void write_diagnostics(const fs::path& dir, const Diagnostics& d) {
  write_text(dir / "diagnostics.txt", diagnostics_text(d));
  write_text(dir / "diagnostics.kv", diagnostics_kv(d));
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int cmd_train(const fs::path& config_path, const CliOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_run_config(config_path);
    const LoadedData loaded = load_dataset(rc);
    const Dataset& data = loaded.data;
    const auto cs = build_constraint_set(rc, data.n_in());
    if (cs) {
      for (const auto& w : cs->warnings()) err << "warning: " << w << "\n";
    }
    const fs::path dir = prepare_output_dir(rc, opts);

    TrainOptions topts;
    if (opts.verbose) {
      topts.observer = [&err](const IterationView& v) {
        if (v.iteration % 1000 == 0) {
          err << "iter " << v.iteration << " sse " << format_double(v.sse) << " change "
              << format_double(v.param_delta) << "\n";
        }
      };
    }
    const TrainResult result = train(data, rc.model, cs ? &*cs : nullptr, topts);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";

    SavedModel saved{result.weights, rc.model.beta,       rc.model.theta_W,
                     rc.model.theta_V, rc.model.activation, loaded.x_columns};
    save_weights(dir / "weights.json", saved);
    write_trace_csv(dir / "sse_trace.csv", "sse", result.sse_trace);
    write_trace_csv(dir / "param_delta_trace.csv", "param_delta", result.param_delta_trace);

    Vector y_hat;
    try {
      y_hat = predict(data.X, result.weights, rc.model.beta, rc.model.activation,
                      rc.model.inner_tol, rc.model.inner_max_iters);
    } catch (const Error& e) {
      err << "warning: forward solve failed (" << e.what()
          << "); predictions use the training state\n";
      y_hat = result.state.U * rc.model.beta;
    }
    Matrix pred(data.n_obs(), data.n_in() + 2);
    pred << data.X, data.Y, y_hat;
    auto header = loaded.x_columns;
    header.push_back(loaded.y_column);
    header.emplace_back("y_hat");
    write_csv(dir / "predictions.csv", header, pred);

    if (rc.emit_plots && !opts.no_plots && !result.sse_trace.empty()) {
      write_fit_svg(dir / "fit.svg", plot_axis(data.X), data.Y, y_hat);
      write_sse_svg(dir / "sse.svg", result.sse_trace, rc.sse_log_scale);
    }
    if (rc.diagnostics) {
      write_diagnostics(dir, run_diagnostics(rc, data, cs, result.weights.W));
    }

    out << "iterations " << result.iterations << "\n";
    out << "converged " << (result.converged ? "yes" : "no") << "\n";
    out << "sse " << format_double(result.sse_trace.empty() ? 0.0 : result.sse_trace.back())
        << "\n";
    out << "foc_aggregate " << format_double(result.foc_report.aggregate) << "\n";
    if (result.delta_halvings) out << "delta_halvings " << result.delta_halvings << "\n";
    out << "output_dir " << dir.string() << "\n";
    return result.converged ? kExitOk : kExitIterationCap;
  });
}

int cmd_predict(const fs::path& weights_path, const fs::path& data_path, const fs::path& out_path,
                const CliOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SavedModel m = load_weights(weights_path);
    const CsvTable table = read_csv(data_path);
    std::vector<std::string> cols = m.x_columns;
    if (cols.empty()) {
      if (table.values.cols() != m.weights.V.rows()) {
        throw ConfigError("weights file has no x_columns and the CSV width does not match V");
      }
      cols = table.header;
    }
    Matrix X(table.values.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      X.col(static_cast<Eigen::Index>(j)) = table.values.col(table.column(cols[j]));
    }
    if (X.cols() != m.weights.V.rows()) {
      throw ConfigError("input has " + std::to_string(X.cols()) + " columns, model expects " +
                        std::to_string(m.weights.V.rows()));
    }
    const Vector y_hat = predict(X, m.weights, m.beta, m.activation);
    Matrix res(X.rows(), X.cols() + 1);
    res << X, y_hat;
    cols.emplace_back("y_hat");
    fs::path target = out_path;
    if (opts.output_dir && target.is_relative()) {
      fs::create_directories(*opts.output_dir);
      target = *opts.output_dir / target;
    }
    write_csv(target, cols, res);
    if (opts.verbose) err << "wrote " << X.rows() << " predictions\n";
    out << "predictions " << target.string() << "\n";
    return kExitOk;
  });
}

int cmd_diagnose(const fs::path& config_path, const CliOptions& opts, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_run_config(config_path);
    const LoadedData loaded = load_dataset(rc);
    const auto cs = build_constraint_set(rc, loaded.data.n_in());
    const fs::path dir = prepare_output_dir(rc, opts);
    const Diagnostics d = run_diagnostics(rc, loaded.data, cs, std::nullopt);
    write_diagnostics(dir, d);
    out << diagnostics_text(d);
    return kExitOk;
  });
}

int cmd_gen_poly(const fs::path& config_path, const CliOptions& opts, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_run_config(config_path);
    if (!rc.data.generator) throw ConfigError("data.generator: required for gen-poly");
    const Dataset d = generate_polynomial_dataset(*rc.data.generator);
    const fs::path dir = prepare_output_dir(rc, opts);
    const fs::path target = dir / "data.csv";
    write_dataset_csv(target, d, rc.data.x_columns, rc.data.y_column);
    if (opts.verbose) err << "wrote " << d.n_obs() << " rows\n";
    out << "data " << target.string() << "\n";
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed-point training of recurrent networks"};
  app.require_subcommand(1);
  CliOptions opts;
  std::string output_dir;
  app.add_option("--output-dir", output_dir, "Override the output directory");
  app.add_flag("--no-plots", opts.no_plots, "Skip SVG plots");
  app.add_flag("--verbose", opts.verbose, "Progress on stderr");

  std::string config;
  std::string weights;
  std::string data;
  std::string out_csv;
  auto* train_cmd = app.add_subcommand("train", "Train from a JSON config");
  train_cmd->add_option("config", config)->required();
  auto* predict_cmd = app.add_subcommand("predict", "Predict with saved weights");
  predict_cmd->add_option("weights", weights)->required();
  predict_cmd->add_option("data", data)->required();
  predict_cmd->add_option("out", out_csv)->required();
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Evaluate the convergence conditions");
  diagnose_cmd->add_option("config", config)->required();
  auto* gen_cmd = app.add_subcommand("gen-poly", "Write the polynomial dataset as CSV");
  gen_cmd->add_option("config", config)->required();
  for (auto* sub : {train_cmd, predict_cmd, diagnose_cmd, gen_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (!output_dir.empty()) opts.output_dir = output_dir;

  if (train_cmd->parsed()) return cmd_train(config, opts, out, err);
  if (predict_cmd->parsed()) return cmd_predict(weights, data, out_csv, opts, out, err);
  if (diagnose_cmd->parsed()) return cmd_diagnose(config, opts, out, err);
  return cmd_gen_poly(config, opts, out, err);
}

}  // namespace ocrnn
