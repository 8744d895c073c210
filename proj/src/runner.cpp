#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hlab/numerics.hpp"
#include "hlab/runner.hpp"

namespace hlab {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string header(const ExperimentConfig& config, const std::string& check, const std::string& tag,
                   const std::string& grid, double tolerance) {
  std::string h;
  h += "# check: " + check + "\n";
  h += "# tag: " + tag + "\n";
  h += "# config_hash: " + hex(config.hash()) + "\n";
  h += "# seed: " + std::to_string(config.seed) + "\n";
  h += "# grid: " + grid + " resolution=" + fmt("%.6g", config.resolution) + "\n";
  h += "# tolerance: " + fmt("%.17g", tolerance) + "\n";
  return h;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_plot(const Series& s) {
  if (s.x.size() != s.y.size() || s.x.empty()) throw std::invalid_argument("svg_line_plot: empty or ragged series");
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double x0 = *std::min_element(s.x.begin(), s.x.end());
  double x1 = *std::max_element(s.x.begin(), s.x.end());
  double y0 = *std::min_element(s.y.begin(), s.y.end()) - s.tolerance;
  double y1 = *std::max_element(s.y.begin(), s.y.end()) + s.tolerance;
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 - y0 <= 1e-300) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  std::ostringstream o;
  char buf[160];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  o << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  o << "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(s.name) << "</text>\n";
  // Tolerance band around the series.
  o << "<polygon fill=\"#cfe3f7\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(s.x[i]), py(s.y[i] + s.tolerance));
    o << buf;
  }
  for (std::size_t i = s.x.size(); i-- > 0;) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(s.x[i]), py(s.y[i] - s.tolerance));
    o << buf;
  }
  o << "\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<polyline fill=\"none\" stroke=\"black\" points=\"%.3f,%.3f %.3f,%.3f %.3f,%.3f\"/>\n", L, T, L,
                H - B, W - R, H - B);
  o << buf;
  o << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(s.x[i]), py(s.y[i]));
    o << buf;
  }
  o << "\"/>\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2\" fill=\"#1f5fa8\"/>\n", px(s.x[i]),
                  py(s.y[i]));
    o << buf;
  }
  const auto label = [&](double x, double y, const char* anchor, const std::string& text) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"%s\" font-family=\"sans-serif\" "
                  "font-size=\"11\">", x, y, anchor);
    o << buf << xml_escape(text) << "</text>\n";
  };
  label(L, H - B + 16, "start", fmt("%.6g", x0));
  label(W - R, H - B + 16, "end", fmt("%.6g", x1));
  label(L - 6, H - B, "end", fmt("%.6g", y0));
  label(L - 6, T + 8, "end", fmt("%.6g", y1));
  label((L + W - R) / 2, H - 12, "middle", s.x_label);
  label(L, T - 6, "start", s.y_label + "  (band: +/- " + fmt("%.3g", s.tolerance) + ")");
  o << "</svg>\n";
  return o.str();
}

std::vector<std::string> emit_report(const SuiteResult& result, const ExperimentConfig& config,
                                     const std::string& directory) {
  if (result.checks.empty() && result.series.empty() && result.tables.empty())
    throw std::invalid_argument("emit_report: empty result set");
  // Everything is rendered before the first file is touched.
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& c : result.checks) {
    std::ostringstream o;
    o << header(config, c.check, c.tag, c.resolution, c.tolerance);
    write_report_csv(o, c);
    files.emplace_back(c.check + ".csv", o.str());
  }
  for (const auto& s : result.series) {
    std::ostringstream o;
    o << header(config, s.check.empty() ? s.name : s.check, s.tag, "points=" + std::to_string(s.x.size()),
                s.tolerance);
    o << s.x_label << ',' << s.y_label << '\n';
    char buf[96];
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.x[i], s.y[i]);
      o << buf;
    }
    files.emplace_back(s.name + ".csv", o.str());
    files.emplace_back(s.name + ".svg", svg_line_plot(s));
  }
  for (const auto& t : result.tables) {
    std::ostringstream o;
    o << header(config, t.name, t.tag, "rows=" + std::to_string(t.rows.size()), 0.0);
    for (const auto& a : t.annotations) o << "# " << a << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) o << (i ? "," : "") << t.columns[i];
    o << '\n';
    char buf[40];
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        o << (i ? "," : "") << buf;
      }
      o << '\n';
    }
    files.emplace_back(t.name + ".csv", o.str());
  }
  {
    std::ostringstream o;
    o << header(config, "summary", config.experiment, "suite", 0.0);
    o << "check,worst_margin,tolerance,verdict,ricci_min\n";
    char buf[96];
    for (const auto& c : result.checks) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,", c.worst_margin, c.tolerance);
      o << c.check << buf << to_string(c.verdict);
      std::snprintf(buf, sizeof buf, ",%.17g\n", c.ricci_min);
      o << buf;
    }
    files.emplace_back("summary.csv", o.str());
  }
  files.emplace_back("config.txt", config.canonical());

  std::vector<std::string> names;
  for (const auto& [name, body] : files) {
    if (std::find(names.begin(), names.end(), name) != names.end())
      throw std::logic_error("emit_report: duplicate artifact name '" + name + "'");
    names.push_back(name);
  }
  std::filesystem::create_directories(directory);
  for (const auto& [name, body] : files) {
    const auto path = std::filesystem::path(directory) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw std::runtime_error("emit_report: cannot write " + path.string());
  }
  return names;
}

ExitCode verdict_code(const SuiteResult& result) {
  for (const auto& c : result.checks)
    if (c.verdict == Verdict::violated) return ExitCode::violation;
  return ExitCode::ok;
}

RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log) {
  RunOutcome out;
  const SuiteSpec* suite = find_suite(config.experiment);
  if (!suite) {
    out.code = ExitCode::failure;
    out.error = "unknown suite '" + config.experiment + "'";
    return out;
  }
  try {
    out.result = suite->run(config);
    out.files = emit_report(out.result, config, config.output);
  } catch (const std::exception& e) {
    out.code = ExitCode::failure;
    out.error = e.what();
    log << "error: " << out.error << '\n';
    return out;
  }
  out.code = verdict_code(out.result);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-40s %14s %11s  %s\n", "check", "worst_margin", "tolerance", "verdict");
  log << buf;
  for (const auto& c : out.result.checks) {
    std::snprintf(buf, sizeof buf, "%-40s %14.6e %11.3e  %s\n", c.check.c_str(), c.worst_margin, c.tolerance,
                  to_string(c.verdict).c_str());
    log << buf;
  }
  for (const auto& n : out.result.notes) log << "  " << n << '\n';
  log << "suite " << config.experiment << ": exit " << static_cast<int>(out.code) << " (" << out.files.size()
      << " files in " << config.output << ")\n";
  return out;
}

}  // namespace hlab
