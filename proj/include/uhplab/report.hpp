#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

// Tabular experiment output: CSV with '.' decimal separator and binary64
// round-trip formatting (to_chars), or JSON mirroring the column names.
// Formatting is locale-independent so identical runs are byte-identical.

namespace uhplab {

inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

using Cell = std::variant<double, long long, bool, std::string>;

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string cell_to_string(const Cell& c) {
  switch (c.index()) {
    case 0: return fmt_double(std::get<double>(c));
    case 1: return std::to_string(std::get<long long>(c));
    case 2: return std::get<bool>(c) ? "true" : "false";
    default: return csv_escape(std::get<std::string>(c));
  }
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> provenance;  // echoed config

  void add_row(std::vector<Cell> cells) { rows.push_back(std::move(cells)); }

  std::string to_csv() const {
    std::ostringstream os;
    for (const auto& [k, v] : provenance) os << "# " << k << " = " << v << "\n";
    for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_to_string(row[i]);
      os << "\n";
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["table"] = name;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : provenance) cfg[k] = v;
    j["config"] = cfg;
    j["columns"] = columns;
    nlohmann::json rws = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json r = nlohmann::json::object();
      for (size_t i = 0; i < row.size() && i < columns.size(); ++i) {
        const Cell& c = row[i];
        switch (c.index()) {
          case 0: r[columns[i]] = std::get<double>(c); break;
          case 1: r[columns[i]] = std::get<long long>(c); break;
          case 2: r[columns[i]] = std::get<bool>(c); break;
          default: r[columns[i]] = std::get<std::string>(c); break;
        }
      }
      rws.push_back(std::move(r));
    }
    j["rows"] = std::move(rws);
    return j;
  }
};

}  // namespace uhplab
