#pragma once
#include <map>
#include <string>
#include <vector>

namespace qplane {

//! Deterministic tabular output: every numeric cell is rendered once with
//! %.17g so CSV and JSON are byte-stable for identical configs.
struct Table {
  std::map<std::string, std::string> meta; // effective config echo
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v); // %.17g
std::string format_int(long long v);

std::string to_csv(const Table &t);  // meta as leading "# key=value" lines
std::string to_json(const Table &t); // {"meta":{},"columns":[],"rows":[[]]}

//! Writes to path, or stdout when path is empty.
void write_table(const Table &t, const std::string &format,
                 const std::string &path);

} // namespace qplane
