#include "hlab/inequality_report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::hypothesis_not_met: return "hypothesis-not-met";
  }
  return "unknown";
}

void InequalityReport::finalize() {
  if (rows.empty()) throw std::invalid_argument("InequalityReport '" + check + "': no rows");
  worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) worst_margin = std::min(worst_margin, r.margin);
  if (!hypothesis_met)
    verdict = Verdict::hypothesis_not_met;
  else
    verdict = worst_margin >= -tolerance ? Verdict::holds : Verdict::violated;
}

const ReportRow& InequalityReport::worst_row() const {
  if (rows.empty()) throw std::logic_error("worst_row on an empty report");
  return *std::min_element(rows.begin(), rows.end(),
                           [](const ReportRow& a, const ReportRow& b) { return a.margin < b.margin; });
}

void write_report_csv(std::ostream& out, const InequalityReport& report) {
  out << "check,location,tau,margin\n";
  char buf[128];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.location, r.tau, r.margin);
    out << report.check << ',' << buf << '\n';
  }
  out << "# " << summary_line(report) << '\n';
}

std::string summary_line(const InequalityReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst_margin=%.6e tolerance=%.3e verdict=", report.worst_margin,
                report.tolerance);
  return report.check + " " + buf + to_string(report.verdict);
}

}  // namespace hlab
