#include "bwl/lab/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bwl::lab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::optional<double> to_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      cfg.values_[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any [section]");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    auto& sec = cfg.values_[section];
    if (sec.count(key)) throw ConfigError(where + ": duplicate key " + section + "." + key);
    sec[key] = trim(body.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  if (s == values_.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  consumed_.insert(section + "." + key);
  return &k->second;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& what) const {
  throw ConfigError(origin_ + ": " + section + "." + key + ": " + what);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  return s != values_.end() && s->second.count(key);
}

bool Config::has_section(const std::string& section) const { return values_.count(section) > 0; }

std::string Config::get_string(const std::string& section, const std::string& key) const {
  if (const auto* v = find(section, key)) return *v;
  fail(section, key, "missing required key");
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const auto* v = find(section, key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  auto d = to_double(v);
  if (!d) fail(section, key, "not a number: '" + v + "'");
  return *d;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || errno != 0 || end != v.c_str() + v.size()) fail(section, key, "not an integer: '" + v + "'");
  return i;
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(section, key, "not a boolean: '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto d = to_double(item);
    if (!d) fail(section, key, "bad list entry '" + trim(item) + "'");
    out.push_back(*d);
  }
  if (out.empty()) fail(section, key, "empty list");
  return out;
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  return has(section, key) ? get_list(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

void Config::check_consumed() const {
  std::string unused;
  for (const auto& [section, keys] : values_)
    for (const auto& [key, value] : keys)
      if (!consumed_.count(section + "." + key)) unused += (unused.empty() ? "" : ", ") + section + "." + key;
  if (!unused.empty()) throw ConfigError(origin_ + ": unknown or unused keys: " + unused);
}

std::string Config::hash() const {
  std::string canon;
  for (const auto& [section, keys] : values_)
    for (const auto& [key, value] : keys) canon += section + "." + key + "=" + value + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

}  // namespace bwl::lab
