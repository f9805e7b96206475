#include "qplane/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "qplane/errors.hpp"

namespace qplane {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

std::string to_csv(const Table &t) {
  std::string out;
  for (const auto &[k, v] : t.meta)
    out += "# " + k + "=" + v + "\n";
  for (size_t i = 0; i < t.header.size(); ++i) {
    out += t.header[i];
    out += (i + 1 == t.header.size()) ? "\n" : ",";
  }
  for (const auto &row : t.rows)
    for (size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      out += (i + 1 == row.size()) ? "\n" : ",";
    }
  return out;
}

std::string to_json(const Table &t) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto &[k, v] : t.meta)
    meta[k] = v;
  j["meta"] = meta;
  j["columns"] = t.header;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto &row : t.rows)
    rows.push_back(row);
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

void write_table(const Table &t, const std::string &format,
                 const std::string &path) {
  std::string body;
  if (format == "csv")
    body = to_csv(t);
  else if (format == "json")
    body = to_json(t);
  else
    throw ConfigError("unknown output format: " + format);
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw ConfigError("cannot open output file: " + path);
  f << body;
}

} // namespace qplane
