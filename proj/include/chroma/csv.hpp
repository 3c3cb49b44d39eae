#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace chroma::csv {

// Splits one CSV line. Fields containing commas or quotes must be quoted;
// embedded quotes are doubled.
std::vector<std::string> split(const std::string& line);

// Quotes a field only when needed.
std::string escape(const std::string& field);

std::string join(const std::vector<std::string>& fields);

// Canonical float rendering for CSV output: up to 6 significant digits,
// '.' decimal separator, no locale dependence.
std::string format_double(double v);

// Parses a double, rejecting trailing junk.
double parse_double(const std::string& s);

// Reads all rows of a CSV file; first row is returned separately as header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Table read_file(const std::string& path);

}  // namespace chroma::csv
