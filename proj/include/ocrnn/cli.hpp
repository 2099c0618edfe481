#pragma once

// Command-line front end. Exit codes: 0 converged / success, 2 stopped at
// the iteration cap, 1 error.

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ocrnn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIterationCap = 2;

struct CliOptions {
  std::optional<std::filesystem::path> output_dir;
  bool no_plots = false;
  bool verbose = false;
};

int cmd_train(const std::filesystem::path& config_path, const CliOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_predict(const std::filesystem::path& weights_path, const std::filesystem::path& data_path,
                const std::filesystem::path& out_path, const CliOptions& opts, std::ostream& out,
                std::ostream& err);
int cmd_diagnose(const std::filesystem::path& config_path, const CliOptions& opts,
                 std::ostream& out, std::ostream& err);
int cmd_gen_poly(const std::filesystem::path& config_path, const CliOptions& opts,
                 std::ostream& out, std::ostream& err);

// Parses argv and dispatches to the commands above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ocrnn
