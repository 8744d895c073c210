#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hlab/numerics.hpp"
#include "hlab/runner.hpp"

namespace hlab {

ConfigError::ConfigError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                        message
                                  : message),
      line_(line),
      column_(column) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

std::size_t skip_space(const std::string& s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

double parse_number(const ConfigEntry& e, const std::string& key) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (e.quoted || ec != std::errc() || p != end || !std::isfinite(v))
    throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line, e.value_column);
  return v;
}

std::uint64_t parse_seed(const ConfigEntry& e) {
  std::uint64_t v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (e.quoted || ec != std::errc() || p != end)
    throw ConfigError("'seed' expects a non-negative integer, got '" + e.value + "'", e.line, e.value_column);
  return v;
}

}  // namespace

std::map<std::string, ConfigEntry> parse_config_text(const std::string& text) {
  std::map<std::string, ConfigEntry> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t i = skip_space(raw, 0);
    if (i == raw.size() || raw[i] == '#') continue;
    const int col = static_cast<int>(i) + 1;
    if (raw[i] == '[') {
      std::size_t j = skip_space(raw, i + 1);
      std::size_t k = j;
      if (k >= raw.size() || !ident_start(raw[k])) throw ConfigError("expected a section name", line_no, int(k) + 1);
      while (k < raw.size() && ident_char(raw[k])) ++k;
      section = raw.substr(j, k - j);
      k = skip_space(raw, k);
      if (k >= raw.size() || raw[k] != ']') throw ConfigError("expected ']'", line_no, int(k) + 1);
      k = skip_space(raw, k + 1);
      if (k < raw.size() && raw[k] != '#') throw ConfigError("unexpected text after section", line_no, int(k) + 1);
      continue;
    }
    if (!ident_start(raw[i])) throw ConfigError("expected a key", line_no, col);
    std::size_t k = i;
    while (k < raw.size() && ident_char(raw[k])) ++k;
    const std::string key = raw.substr(i, k - i);
    k = skip_space(raw, k);
    if (k >= raw.size() || raw[k] != '=') throw ConfigError("expected '=' after '" + key + "'", line_no, int(k) + 1);
    k = skip_space(raw, k + 1);
    if (k >= raw.size() || raw[k] == '#') throw ConfigError("missing value for '" + key + "'", line_no, int(k) + 1);
    ConfigEntry e;
    e.line = line_no;
    e.column = col;
    e.value_column = static_cast<int>(k) + 1;
    if (raw[k] == '"') {
      e.quoted = true;
      std::size_t q = k + 1;
      for (; q < raw.size() && raw[q] != '"'; ++q) {
        if (raw[q] == '\\' && q + 1 < raw.size()) ++q;
        e.value += raw[q];
      }
      if (q >= raw.size()) throw ConfigError("unterminated string", line_no, e.value_column);
      k = q + 1;
    } else {
      std::size_t q = k;
      while (q < raw.size() && raw[q] != ' ' && raw[q] != '\t' && raw[q] != '#') ++q;
      e.value = raw.substr(k, q - k);
      k = q;
    }
    k = skip_space(raw, k);
    if (k < raw.size() && raw[k] != '#') throw ConfigError("unexpected text after value", line_no, int(k) + 1);
    const std::string full = section.empty() ? key : section + "." + key;
    if (auto it = out.find(full); it != out.end())
      throw ConfigError("duplicate key '" + full + "' (first set on line " + std::to_string(it->second.line) + ")",
                        line_no, col);
    out.emplace(full, std::move(e));
  }
  return out;
}

std::map<std::string, ConfigEntry> parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

double ExperimentConfig::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw std::out_of_range("no parameter '" + key + "'");
  return it->second;
}

double ExperimentConfig::tolerance(const std::string& check) const {
  auto it = tolerances.find(check);
  if (it == tolerances.end()) throw std::out_of_range("no tolerance for '" + check + "'");
  return it->second;
}

int ExperimentConfig::scaled(const std::string& key) const {
  return std::max(1, static_cast<int>(std::lround(param(key) * resolution)));
}

std::string ExperimentConfig::canonical() const {
  // The output directory is deliberately left out: moving a run must not change its hash.
  std::string s;
  char buf[64];
  s += "experiment = " + experiment + "\n";
  s += "seed = " + std::to_string(seed) + "\n";
  std::snprintf(buf, sizeof buf, "%.17g", resolution);
  s += std::string("resolution = ") + buf + "\n";
  for (const auto& [k, v] : params) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += k + " = " + buf + "\n";
  }
  for (const auto& [k, v] : tolerances) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += "tolerance." + k + " = " + buf + "\n";
  }
  return s;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

ExperimentConfig resolve_config(const std::map<std::string, ConfigEntry>& entries, const CliOverrides& cli) {
  auto exp = entries.find("experiment");
  if (exp == entries.end()) throw ConfigError("missing required key 'experiment'", 0, 0);
  const SuiteSpec* suite = find_suite(exp->second.value);
  if (!suite)
    throw ConfigError("unknown suite '" + exp->second.value + "'", exp->second.line, exp->second.value_column);

  ExperimentConfig cfg;
  cfg.experiment = suite->name;
  for (const auto& p : suite->params) cfg.params[p.key] = p.value;
  for (const auto& [check, tol] : suite->tolerances) cfg.tolerances[check] = tol;

  for (const auto& [key, e] : entries) {
    if (key == "experiment") continue;
    if (key == "seed") {
      cfg.seed = parse_seed(e);
    } else if (key == "output") {
      if (e.value.empty()) throw ConfigError("'output' must not be empty", e.line, e.value_column);
      cfg.output = e.value;
    } else if (key == "resolution") {
      cfg.resolution = parse_number(e, key);
      if (!(cfg.resolution > 0.0)) throw ConfigError("'resolution' must be positive", e.line, e.value_column);
    } else if (key.rfind("tolerance.", 0) == 0) {
      const std::string check = key.substr(10);
      if (!cfg.tolerances.count(check))
        throw ConfigError("unknown tolerance '" + check + "' for suite " + suite->name, e.line, e.column);
      const double v = parse_number(e, key);
      if (!(v > 0.0)) throw ConfigError("tolerance '" + check + "' must be positive", e.line, e.value_column);
      cfg.tolerances[check] = v;
    } else {
      if (!cfg.params.count(key)) throw ConfigError("unknown key '" + key + "' for suite " + suite->name, e.line, e.column);
      cfg.params[key] = parse_number(e, key);
    }
  }
  if (cli.output) cfg.output = *cli.output;
  if (cli.seed) cfg.seed = *cli.seed;
  if (cli.resolution) {
    if (!(*cli.resolution > 0.0)) throw ConfigError("--resolution must be positive", 0, 0);
    cfg.resolution = *cli.resolution;
  }
  return cfg;
}

ExperimentConfig default_config(const std::string& suite) {
  std::map<std::string, ConfigEntry> entries;
  ConfigEntry e;
  e.value = suite;
  e.quoted = true;
  entries.emplace("experiment", e);
  return resolve_config(entries);
}

}  // namespace hlab
