// harness.hpp — configuration-driven experiment runner.
//
// A run is fully determined by its ExperimentConfig: identical configs
// (including the seed) produce byte-identical JSON and CSV reports for any
// worker count. Precedence for every setting: command-line flag, then config
// file, then the experiment's built-in default.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pcsft {

inline constexpr int kReportSchemaVersion = 1;

/// Invalid or unreadable configuration (exit status 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridConfig {
  std::int64_t points = 128;
  double length = 20.0;
  std::string boundary = "periodic";  // periodic | dirichlet
  double mass = 1.0;
  double spring = 1.0;  // harmonic well V = spring x^2 / 2
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> n;        // phase-space degrees of freedom
  std::optional<std::int64_t> samples;  // Monte Carlo draws per estimate
  std::optional<std::vector<double>> alphas;
  GridConfig grid;
  std::string variable = "all";  // alpha-scan selector
  unsigned workers = 1;
  std::string out;  // report directory; empty = no files
  std::map<std::string, double> tolerances;

  /// Override if present, otherwise `fallback`.
  double tolerance(const std::string& key, double fallback) const;

  /// Every setting that influences results (not `out`, not `workers`) as a
  /// key-sorted JSON object; unset optional values are null.
  nlohmann::json canonical() const;
  /// FNV-1a of canonical().dump(), 16 hex digits.
  std::string hash() const;
};

/// Throws ConfigError on unknown keys, missing seed, wrong types or
/// out-of-range values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Tolerance keys accepted under "tolerances".
const std::vector<std::string>& tolerance_keys();

struct Metric {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double standard_error = 0.0;
  double tolerance = 0.0;
  std::string comparison;  // "<=", ">=", "abs_diff<=", "z<="
  bool pass = false;
};

struct Artifact {
  std::string filename;
  std::string content;
};

struct ReportRecord {
  std::string experiment;
  std::string config_hash;
  nlohmann::json config;
  std::string conventions;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
  std::vector<Artifact> artifacts;  // extra files written next to the report
  double duration_seconds = 0.0;    // not written to report files

  /// value <= tol.
  Metric& at_most(const std::string& name, double value, double tol);
  /// value >= threshold.
  Metric& at_least(const std::string& name, double value, double threshold);
  /// |value - target| <= tol.
  Metric& abs_diff(const std::string& name, double value, double target, double tol);
  /// |value - target| <= z * se.
  Metric& z_score(const std::string& name, double value, double target, double se, double z);

  bool passed() const;
  /// Metrics whose name starts with `prefix`; all pass and at least one exists.
  bool passed(const std::string& prefix) const;

  nlohmann::json to_json() const;
  /// One row per metric.
  void write_csv(std::ostream& os) const;
  /// Writes <dir>/<experiment>.json, <dir>/<experiment>.csv and artifacts.
  /// Throws std::runtime_error on I/O failure.
  void write(const std::filesystem::path& dir) const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::function<void(const ExperimentConfig&, ReportRecord&)> body;
};

const std::vector<ExperimentInfo>& experiment_registry();
void list_experiments(std::ostream& os);

/// Runs one registered experiment; throws ConfigError for unknown names.
/// Writes the report when config.out is non-empty.
ReportRecord run(const ExperimentConfig& config);

}  // namespace pcsft
