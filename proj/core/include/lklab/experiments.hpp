#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

// Batch experiments behind the command line driver. A config is one JSON
// document:
//   {"schema_version": 1, "experiment": "...", "seed": 1, "workers": 0,
//    "params": {...}, "output": {"dir": ".", "csv": true, "summary": true, "plot": true}}
// Unknown keys, wrong types and non-positive tolerances are schema errors.
namespace lklab::experiments {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kPass = 0,
  kFail = 1,
  kSchema = 2,
  kDegenerate = 3,
  kQuadrature = 4,
  kIntegration = 5,
  kOther = 6,
};

struct ParamSpec {
  std::string name;
  nlohmann::json default_value;
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo& find(const std::string& name);
/// Machine-readable reference of every experiment, parameter and default.
nlohmann::json schema_reference();

struct Config {
  std::string experiment;
  std::uint64_t seed = 1;
  int workers = 0;
  nlohmann::json params;  // defaults merged in
  std::string out_dir = ".";
  bool write_csv = true;
  bool write_summary = true;
  bool write_plot = true;
};

/// Validates and fills defaults. Throws ConfigError.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

struct Comparison {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json extra = nlohmann::json::object();
};

struct Series {
  std::string label;
  std::vector<double> t, value;
};

struct RunResult {
  std::string experiment;
  std::vector<Comparison> comparisons;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
  std::vector<Series> running;  // running averages against the horizon
  double plot_target = 0.0;

  bool pass() const;
  /// {schema_version, experiment, seed, params, estimate, target, tolerance, pass, comparisons, details}.
  nlohmann::json summary(const Config& cfg) const;
};

using Progress = std::function<void(const std::string& stage, std::size_t done, std::size_t total)>;

RunResult run(const Config& cfg, const Progress& progress = {});

/// Writes samples.csv, summary.json and running_average.svg under cfg.out_dir as enabled.
std::vector<std::string> write_artifacts(const RunResult& r, const Config& cfg);

std::string render_svg(const std::vector<Series>& series, double target, const std::string& title);

/// Exit code for an exception escaping run().
int exit_code_for(const std::exception& e);

}  // namespace lklab::experiments
