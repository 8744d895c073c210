#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlab/inequality_report.hpp"

namespace hlab {

// ---- config ---------------------------------------------------------------

// Parse or validation error with a 1-based source position (0 if none).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ConfigEntry {
  std::string value;  // unquoted
  bool quoted = false;
  int line = 0;
  int column = 0;  // column of the key
  int value_column = 0;
};

// `key = value` lines, `[section]` headers, `#` comments. Keys inside a
// section are stored as "section.key". Duplicate keys are an error.
std::map<std::string, ConfigEntry> parse_config_text(const std::string& text);
std::map<std::string, ConfigEntry> parse_config_file(const std::string& path);

struct ParamSpec {
  std::string key;  // "section.key"
  double value = 0.0;
  std::string help;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::string output = "out";
  double resolution = 1.0;  // multiplies grid sizes
  std::map<std::string, double> params;      // "model.*", "grid.*"
  std::map<std::string, double> tolerances;  // by check name

  double param(const std::string& key) const;
  double tolerance(const std::string& check) const;
  int scaled(const std::string& key) const;  // round(param * resolution)
  // Canonical `key = value` dump of the resolved config; stable across runs.
  std::string canonical() const;
  std::uint64_t hash() const;
};

struct CliOverrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
};

// ---- suites ---------------------------------------------------------------

struct Series {
  std::string name;  // file stem
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  double tolerance = 0.0;  // half-width of the drawn band
  std::string check;       // owning check, for the header
  std::string tag;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string tag;
  std::vector<std::string> annotations;  // extra "# ..." header lines
};

struct SuiteResult {
  std::vector<InequalityReport> checks;
  std::vector<Series> series;
  std::vector<Table> tables;
  std::vector<std::string> notes;  // extra lines for the console summary
};

struct SuiteSpec {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::vector<std::pair<std::string, double>> tolerances;  // check name, default
  std::function<SuiteResult(const ExperimentConfig&)> run;
};

const std::vector<SuiteSpec>& registered_suites();
const SuiteSpec* find_suite(const std::string& name);

// Resolves a parsed file against the suite's keys; throws ConfigError.
ExperimentConfig resolve_config(const std::map<std::string, ConfigEntry>& entries, const CliOverrides& cli = {});
// Default config for a suite, as if the file held only `experiment = name`.
ExperimentConfig default_config(const std::string& suite);

// ---- running --------------------------------------------------------------

enum class ExitCode : int { ok = 0, violation = 1, failure = 2 };

struct RunOutcome {
  ExitCode code = ExitCode::ok;
  SuiteResult result;
  std::vector<std::string> files;  // written, relative to the output dir
  std::string error;               // set when code == failure
};

// Runs the suite and writes its artifacts into config.output.
RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log);

// Writes CSVs and SVGs for every check, series and table. Throws on an empty
// result set or I/O failure; nothing is written in the empty case.
std::vector<std::string> emit_report(const SuiteResult& result, const ExperimentConfig& config,
                                     const std::string& directory);

// Exit code from asserted checks: hypothesis-not-met rows are not asserted.
ExitCode verdict_code(const SuiteResult& result);

std::string svg_line_plot(const Series& series);

}  // namespace hlab
