#include "bwl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace bwl {

using nlohmann::ordered_json;

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("Table: row width mismatch");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("Table: no column " + name);
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double ExperimentReport::scalar(const std::string& name) const {
  auto it = scalars.find(name);
  if (it == scalars.end()) throw std::out_of_range("ExperimentReport: no scalar " + name);
  return it->second;
}

void ExperimentReport::verdict(std::string name, bool pass, std::string detail) {
  verdicts.push_back({std::move(name), pass, std::move(detail)});
}

namespace {

ordered_json encode(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw std::invalid_argument("report JSON: bad numeric value " + s);
}

}  // namespace

std::string to_json_string(const ExperimentReport& report) {
  ordered_json j;
  j["kind"] = report.kind;
  j["config_hash"] = report.config_hash;
  j["all_pass"] = report.all_pass();
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : report.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  ordered_json scalars = ordered_json::object();
  for (const auto& [k, v] : report.scalars) scalars[k] = encode(v);
  j["scalars"] = scalars;
  ordered_json labels = ordered_json::object();
  for (const auto& [k, v] : report.labels) labels[k] = v;
  j["labels"] = labels;
  ordered_json tables = ordered_json::object();
  for (const auto& [name, t] : report.tables) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) {
      ordered_json row = ordered_json::array();
      for (double v : r) row.push_back(encode(v));
      rows.push_back(row);
    }
    tables[name] = {{"columns", t.columns}, {"rows", rows}};
  }
  j["tables"] = tables;
  j["timing"] = {{"timestamp", report.timestamp}, {"runtime_seconds", report.runtime_seconds}};
  return j.dump(2);
}

ExperimentReport parse_report_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  ExperimentReport r;
  r.kind = j.at("kind").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& v : j.at("verdicts"))
    r.verdicts.push_back({v.at("name").get<std::string>(), v.at("pass").get<bool>(),
                          v.at("detail").get<std::string>()});
  for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = decode(v);
  for (const auto& [k, v] : j.at("labels").items()) r.labels[k] = v.get<std::string>();
  for (const auto& [name, t] : j.at("tables").items()) {
    Table table;
    table.columns = t.at("columns").get<std::vector<std::string>>();
    for (const auto& row : t.at("rows")) {
      std::vector<double> vals;
      for (const auto& v : row) vals.push_back(decode(v));
      table.rows.push_back(std::move(vals));
    }
    r.tables[name] = std::move(table);
  }
  r.timestamp = j.at("timing").at("timestamp").get<std::string>();
  r.runtime_seconds = j.at("timing").at("runtime_seconds").get<double>();
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace bwl
