#pragma once

// Minimal CSV reader for the project's own numeric file formats: one header
// line, comma-separated, no quoting.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "twinstream/error.hpp"

namespace twinstream::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string_view> fields;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

/// Checks the header and returns the data rows. Blank lines are skipped.
inline std::vector<Row> parse(std::string_view text, std::string_view expected_header, const std::string& source) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != expected_header)
        fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": expected header '" +
                                    std::string(expected_header) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    rows.push_back({line_no, split(line)});
  }
  if (!header_seen) fail(ErrorKind::Format, source + ": missing header");
  return rows;
}

[[noreturn]] inline void row_error(const std::string& source, const Row& row, const std::string& what) {
  fail(ErrorKind::Format, source + ":" + std::to_string(row.line) + ": " + what);
}

inline void expect_fields(const std::string& source, const Row& row, std::size_t n) {
  if (row.fields.size() != n)
    row_error(source, row, "expected " + std::to_string(n) + " fields, got " + std::to_string(row.fields.size()));
}

inline double to_double(const std::string& source, const Row& row, std::size_t col) {
  const std::string_view s = row.fields[col];
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    row_error(source, row, "field " + std::to_string(col + 1) + " is not a number: '" + std::string(s) + "'");
  return v;
}

inline std::int64_t to_int(const std::string& source, const Row& row, std::size_t col) {
  const std::string_view s = row.fields[col];
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    row_error(source, row, "field " + std::to_string(col + 1) + " is not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace twinstream::csv
