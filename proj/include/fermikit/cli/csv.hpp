#pragma once

// CSV dialect: ',' separator, '.' decimal point, 17 significant digits,
// '\n' line endings, '#' comment lines.

#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fermikit/errors.hpp"

namespace fermikit::cli {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Guard against a locale with a ',' decimal separator.
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

class CsvDocument {
public:
  void comment(std::string_view text) {
    text_ += "# ";
    text_ += text;
    text_ += '\n';
  }

  void header(const std::vector<std::string>& columns) { row(columns); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

private:
  std::string text_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("failed writing output file '" + path + "'");
}

} // namespace fermikit::cli
