#pragma once

// Experiment results: named scalars, numeric tables, pass/fail verdicts.
// Serialized to JSON (lossless, non-finite values encoded as strings) and
// tables to RFC-4180 CSV.

#include <map>
#include <string>
#include <vector>

namespace bwl {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::vector<double> column(const std::string& name) const;
  bool operator==(const Table&) const = default;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
  bool operator==(const Verdict&) const = default;
};

struct ExperimentReport {
  std::string kind;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> labels;
  std::map<std::string, Table> tables;
  std::vector<Verdict> verdicts;
  std::string config_hash;
  double runtime_seconds = 0.0;
  std::string timestamp;

  bool all_pass() const;
  /// Throws std::out_of_range for a missing name.
  double scalar(const std::string& name) const;
  void verdict(std::string name, bool pass, std::string detail = {});
};

/// Pretty-printed JSON with keys in a stable order.
std::string to_json_string(const ExperimentReport& report);
ExperimentReport parse_report_json(const std::string& text);
std::string to_csv(const Table& table);

}  // namespace bwl
