#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bwl/lab/config.hpp"
#include "bwl/report.hpp"

namespace bwl::lab {

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string anchor;  // the estimate or theorem the experiment exercises
};

const std::vector<ExperimentInfo>& experiment_registry();
/// One line per kind: name, description, anchor.
std::string list_experiments();

class AdmissibilityFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  bool override_admissibility = false;
  int jobs = 1;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
};

enum ExitCode { kExitOk = 0, kExitOther = 1, kExitConfig = 2, kExitAdmissibility = 3, kExitBlowup = 4 };

/// Runs the experiment a parsed config describes and returns its report with
/// config_hash, runtime and timestamp filled in. Throws ConfigError,
/// AdmissibilityFailure, BlowupError or the library's own exceptions.
ExperimentReport run_config(Config& cfg, const RunOptions& opts);

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path out_dir;
  std::optional<ExperimentReport> report;
  std::string error;
};

/// Loads, runs and writes report.json, one CSV per table and SVG plots into
/// the output directory. Failures write error.json there (when the directory
/// is known) and a one-line message to stderr.
RunResult run_file(const std::filesystem::path& config_path, const RunOptions& opts);

/// Exit code for an exception escaping run_config.
int exit_code_for(const std::exception& e);

}  // namespace bwl::lab
