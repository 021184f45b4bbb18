#include "contlim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "contlim/errors.hpp"

namespace contlim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw config_error("config key '" + key + "' is not a number: " + text);
  }
  return v;
}

}  // namespace

ConfigMap::ConfigMap(std::map<std::string, std::string> kv, std::string raw)
    : kv_(std::move(kv)), raw_(std::move(raw)) {}

bool ConfigMap::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_double(key, it->second);
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  return static_cast<int>(v);
}

std::vector<double> ConfigMap::get_doubles(
    const std::string& key, std::vector<double> fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::istringstream iss(it->second);
  std::string tok;
  while (iss >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) {
    throw config_error("config key '" + key + "' has an empty list value");
  }
  return out;
}

std::vector<int> ConfigMap::get_ints(const std::string& key,
                                     std::vector<int> fallback) const {
  std::vector<double> dfall(fallback.begin(), fallback.end());
  std::vector<int> out;
  for (double v : get_doubles(key, dfall)) out.push_back(static_cast<int>(v));
  return out;
}

std::string ConfigMap::require_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) {
    throw config_error("missing required config key '" + key + "'");
  }
  return it->second;
}

double ConfigMap::require_double(const std::string& key) const {
  return parse_double(key, require_string(key));
}

std::uint64_t ConfigMap::hash() const { return fnv1a(raw_); }

ConfigMap parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream iss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("malformed section header at line " +
                           std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("expected 'key = value' at line " +
                         std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error("empty key at line " + std::to_string(lineno));
    }
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return ConfigMap(std::move(kv), text);
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace contlim
