#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace contlim {

// Flat view of an INI-style config file: `[section]` headers, `key = value`
// lines, `#` comments. Keys are stored as "section.key"; list values are
// whitespace-separated.
class ConfigMap {
 public:
  ConfigMap() = default;
  ConfigMap(std::map<std::string, std::string> kv, std::string raw);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  std::vector<double> fallback) const;
  std::vector<int> get_ints(const std::string& key,
                            std::vector<int> fallback) const;

  // throwing variants for required keys (config_error)
  std::string require_string(const std::string& key) const;
  double require_double(const std::string& key) const;

  const std::string& raw_text() const { return raw_; }
  std::uint64_t hash() const;  // FNV-1a of the raw text

 private:
  std::map<std::string, std::string> kv_;
  std::string raw_;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);  // throws config_error

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace contlim
