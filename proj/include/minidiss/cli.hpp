#pragma once

// Scenario runner behind the `minidiss` executable: config parsing, the run,
// verify and sweep commands, and the CSV / JSON writers.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minidiss/thermo.hpp"

namespace minidiss::cli {

/// Malformed or invalid configuration (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kNumerical = 3,
  kStatistical = 4,
};

enum class ModelKind { jaynes_cummings, dephasing, custom_gksl };

std::string to_string(ModelKind m);

struct GridConfig {
  double t_max = 50.0;
  double dt = 2.5e-3;
};

struct CheckConfig {
  int minimality_trials = 200;
  int witness_samples = 500;
  int mc_haar_samples = 200000;
  /// flips the sign of the second Haar moment in the closed forms under test
  bool forced_bug = false;
};

struct RunConfig {
  std::optional<ModelKind> model;
  std::map<std::string, double> params;
  GridConfig grid;
  std::vector<std::string> outputs;
  CheckConfig checks;
  std::uint64_t seed = 20240611;
};

/// Every column trajectory.csv can carry, in output order.
const std::vector<std::string>& csv_columns();

/// Default parameters of a model; keys double as the allowed parameter names.
std::map<std::string, double> default_params(ModelKind m);

/// Throws ConfigError on unknown keys, unknown model or parameter names, bad
/// column names, or a grid violating t_max > 0, dt > 0, dt <= t_max / 100.
RunConfig parse_config(const nlohmann::json& j);
/// Throws ConfigError when the file is missing or not valid JSON.
nlohmann::json read_json(const std::filesystem::path& path);
RunConfig load_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------

struct CheckEntry {
  double value = 0.0;
  /// NaN for informational entries
  double tolerance = 0.0;
  bool pass = true;
  /// "ok", "fail" or "insufficient_precision"
  std::string status;
  /// where the worst value sits (for time series), NaN otherwise
  double time = 0.0;
};

class Report {
 public:
  /// pass iff value <= tolerance
  void upper(const std::string& key, double value, double tolerance, double time = NAN);
  /// pass iff value >= bound
  void lower(const std::string& key, double value, double bound, double time = NAN);
  void info(const std::string& key, double value);
  void add(const std::string& key, const CheckEntry& e);

  bool all_pass() const;
  /// key of the first failing entry, empty if none
  std::string first_failure() const;
  const std::vector<std::pair<std::string, CheckEntry>>& entries() const { return entries_; }
  const CheckEntry& at(const std::string& key) const;
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<std::pair<std::string, CheckEntry>> entries_;
};

/// 17 significant digits; NaN and infinities as "nan", "inf", "-inf".
std::string format_double(double x);

/// RFC-4180 CSV with a header row and CRLF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// ---------------------------------------------------------------------------

struct RunResult {
  Report report;
  nlohmann::ordered_json meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;
  /// first failing check with its time, empty when everything passed
  std::string diagnostic;
};

/// Full scenario pipeline without touching the file system. Throws
/// ConfigError when the config lacks a model and NumericalError (or another
/// library error) on numerical failure.
RunResult run_scenario(const RunConfig& cfg);

/// Writes trajectory.csv, report.json and meta.json into `out`.
void write_run(const RunResult& r, const std::filesystem::path& out);

/// Statistical and property suites; report only.
Report verify_suites(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// command entry points, returning exit codes

int command_run(const std::filesystem::path& config, const std::filesystem::path& out);
int command_verify(const std::filesystem::path& config, const std::filesystem::path& out);
int command_sweep(const std::filesystem::path& config, const std::string& param,
                  const std::vector<double>& values, const std::filesystem::path& out);

}  // namespace minidiss::cli
