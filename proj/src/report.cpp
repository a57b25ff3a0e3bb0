#include "qclab/report.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"

namespace qclab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_value(const ReportValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

namespace {

nlohmann::ordered_json to_json(const ReportValue& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&v)) return *i;
  return std::get<std::string>(v);
}

}  // namespace

void write_csv(std::ostream& os, const Report& report) {
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    os << (c ? "," : "") << report.columns[c];
  }
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_value(row[c]);
    os << '\n';
  }
  os << "# version=" << kVersion << '\n';
  for (const auto& [k, v] : report.params) os << "# " << k << '=' << format_value(v) << '\n';
  for (const auto& [k, v] : report.summary) os << "# " << k << '=' << format_value(v) << '\n';
}

void write_json(std::ostream& os, const Report& report) {
  nlohmann::ordered_json doc;
  auto& params = doc["params"] = nlohmann::ordered_json::object();
  params["version"] = kVersion;
  for (const auto& [k, v] : report.params) params[k] = to_json(v);
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size() && c < report.columns.size(); ++c) {
      obj[report.columns[c]] = to_json(row[c]);
    }
    doc["rows"].push_back(std::move(obj));
  }
  auto& summary = doc["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.summary) summary[k] = to_json(v);
  os << doc.dump(2) << '\n';
}

}  // namespace qclab
