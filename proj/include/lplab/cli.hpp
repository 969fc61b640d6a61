#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lplab/models.hpp"

namespace lplab::cli {

// exit statuses: 0 all assertions pass, 1 assertion/numerical failure,
// 2 invalid config or usage
inline constexpr int kStatusOk = 0;
inline constexpr int kStatusFailed = 1;
inline constexpr int kStatusUsage = 2;

struct GridSpec {
  double min = -5.0;
  double max = 5.0;
  int count = 101;

  std::vector<double> materialize() const;
};

struct ExperimentConfig {
  std::string command;
  std::optional<models::Prior> prior;
  std::optional<models::NoiseModel> noise;
  double a = 0.5;
  double p = 2.0;
  GridSpec y_grid;
  std::string out_stem;  // artifact base name; defaults to the command
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> tolerances;
  nlohmann::json extra;  // command-specific fields
};

// Parses and validates one JSON config document. Throws
// std::invalid_argument with a usage message on malformed input.
ExperimentConfig parse_config(const nlohmann::json& doc);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;
};

struct RunResult {
  int status = kStatusOk;
  std::filesystem::path csv_path;   // empty if the command emits no CSV
  std::filesystem::path json_path;  // summary, always written
};

// Runs one experiment: writes a CSV table and a JSON summary (schema 1,
// stable key order, atomic temp-file + rename), returns the exit status.
// Honors the LPLAB_OUT_DIR environment variable as an output override.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

// Convenience entry used by the command-line binary: load config file,
// parse, run; maps config errors to kStatusUsage.
int run_from_file(const std::filesystem::path& config_path, const RunOptions& opts);

// prior/noise descriptor parsing shared with fixtures and tests
models::Prior parse_prior(const nlohmann::json& doc);
models::NoiseModel parse_noise(const nlohmann::json& doc);

// 17-significant-digit formatting used in every CSV (lossless round trip)
std::string format_number(double v);

}  // namespace lplab::cli
