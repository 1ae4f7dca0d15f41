#pragma once

// Experiment configuration files: flat `key = value` pairs grouped under
// `[section]` headers. `#` and `;` start comments. Every key must be read by
// the experiment that runs; leftovers are reported as errors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwl::lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated numbers.
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Throws ConfigError naming every key no getter has read.
  void check_consumed() const;

  /// FNV-1a 64 of the canonical `section.key=value` lines, as 16 hex digits.
  std::string hash() const;
  std::string origin() const { return origin_; }

 private:
  const std::string* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::set<std::string> consumed_;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace bwl::lab
