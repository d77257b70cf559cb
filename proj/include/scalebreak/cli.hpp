#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "scalebreak/mars.hpp"
#include "scalebreak/series.hpp"

namespace scalebreak {

enum class Command { Detect, Simulate, FitDist, TestScale };

enum ExitStatus : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

struct RunConfig {
  Command command = Command::Detect;
  std::optional<std::filesystem::path> input_path;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool seed_given = false;
  MarsConfig mars;
  int bootstrap_b = 1000;
  /// Report destination; standard output when empty.
  std::optional<std::filesystem::path> output_path;
  /// Plot-data destination; nothing is written when empty.
  std::optional<std::filesystem::path> plot_data_path;
  std::string scenario;
  std::optional<std::size_t> split;
  std::optional<std::size_t> trials;

  bool emit_plot_data() const { return plot_data_path.has_value(); }
  void validate() const;
};

/// One finite number per line. A non-numeric first line is taken as a
/// header; blank lines are ignored. Record numbers in errors are 1-based
/// line numbers.
TimeSeries load_series(const std::filesystem::path& path);

/// Executes a parsed configuration. Errors propagate as exceptions.
void run(const RunConfig& config, std::ostream& out);

/// Parses argv, runs, and maps failures to an exit status with a one-line
/// diagnostic on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scalebreak
