#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uhplab/weights.hpp"

// Flat key-value experiment configs: one experiment per file, '#' comments,
// 'key = value' lines.  Every read goes through a typed accessor with its
// default embedded; the effective values are echoed into output headers.

namespace uhplab {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& why)
      : std::runtime_error("config field '" + field + "': " + why) {}
};

class KeyValues {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    std::string v = it == values_.end() ? def : it->second;
    effective_[key] = v;
    return v;
  }
  double get_double(const std::string& key, double def) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
      effective_[key] = fmt_compact(def);
      return def;
    }
    try {
      size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      effective_[key] = it->second;
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a real number, got '" + it->second + "'");
    }
  }
  long long get_int(const std::string& key, long long def) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
      effective_[key] = std::to_string(def);
      return def;
    }
    try {
      size_t pos = 0;
      long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      effective_[key] = it->second;
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected an integer, got '" + it->second + "'");
    }
  }

  const std::map<std::string, std::string>& effective() const { return effective_; }
  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  static std::string fmt_compact(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> effective_;
};

inline KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    kv.set(key, val);
  }
  return kv;
}

inline KeyValues parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str());
}

// keys: family (power | power_log), s, c, eps1, eps2, k
inline WeightSpec weight_from_config(const KeyValues& kv) {
  std::string family = kv.get_string("family", "power");
  double s = kv.get_double("s", 1.0);
  double c = kv.get_double("c", 1.0);
  long long e1 = kv.get_int("eps1", 1);
  long long e2 = kv.get_int("eps2", 1);
  double k = kv.get_double("k", 1.0);
  if ((e1 != 0 && e1 != 1) || (e2 != 0 && e2 != 1))
    throw ConfigError("eps1/eps2", "must be 0 or 1");
  GrowthFunction phi;
  if (family == "power")
    phi = GrowthFunction::power(s, c);
  else if (family == "power_log")
    phi = GrowthFunction::power_log(s);
  else
    throw ConfigError("family", "unknown growth family '" + family + "'");
  return WeightSpec{static_cast<int>(e1), static_cast<int>(e2), k, phi};
}

struct ExperimentConfig {
  std::string experiment;
  KeyValues kv;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
  uint64_t seed = 1;
  int workers = 2;
};

}  // namespace uhplab
