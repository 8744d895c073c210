#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hlab {

enum class Verdict { holds, violated, hypothesis_not_met };

std::string to_string(Verdict v);

struct ReportRow {
  double location = 0.0;
  double tau = 0.0;
  double margin = 0.0;
};

// A sampled inequality "margin >= 0". Equality checks record -|residual|.
struct InequalityReport {
  std::string check;
  std::string tag;          // short description of the statement being tested
  std::string resolution;   // grid parameters the rows were computed at
  std::vector<ReportRow> rows;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  double ricci_min = 0.0;   // certificate value; NaN when not applicable
  bool hypothesis_met = true;
  Verdict verdict = Verdict::holds;

  void add(double location, double tau, double margin) { rows.push_back({location, tau, margin}); }
  // Fills worst_margin and verdict. A failed hypothesis always yields
  // hypothesis_not_met, whatever the margins say.
  void finalize();
  // Location/tau of the worst row.
  const ReportRow& worst_row() const;
  bool holds() const { return verdict == Verdict::holds; }
};

void write_report_csv(std::ostream& out, const InequalityReport& report);
std::string summary_line(const InequalityReport& report);

}  // namespace hlab
