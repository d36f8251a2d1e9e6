#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "txamp/errors.hpp"

namespace txamp {

// Flat `key = value` configuration shared by every subcommand. Lines starting
// with '#' are comments. Later assignments win, as do --set overrides.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);

  // "key=value" as given on the command line.
  void apply_override(const std::string& key_eq_value);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Comma separated doubles, e.g. "0.01,1,10".
  std::vector<double> get_double_list(const std::string& key) const;

  std::vector<std::string> keys() const;

 private:
  [[noreturn]] void missing(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace txamp
