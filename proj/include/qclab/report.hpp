#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qclab {

inline constexpr const char* kVersion = "qclab 1.0.0";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

using ReportValue = std::variant<double, long long, std::string>;

std::string format_value(const ReportValue& v);

/// A flat result table. CSV: header row, data rows, then `# key=value` footer
/// lines for params and summary. JSON: {"params", "rows", "summary"}.
struct Report {
  std::vector<std::pair<std::string, ReportValue>> params;
  std::vector<std::string> columns;
  std::vector<std::vector<ReportValue>> rows;
  std::vector<std::pair<std::string, ReportValue>> summary;

  void param(std::string key, ReportValue value) { params.emplace_back(std::move(key), std::move(value)); }
  void note(std::string key, ReportValue value) { summary.emplace_back(std::move(key), std::move(value)); }
};

void write_csv(std::ostream& os, const Report& report);
void write_json(std::ostream& os, const Report& report);

}  // namespace qclab
