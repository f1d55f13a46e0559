#pragma once

// CSV reading and writing with round-trip exact number formatting.

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "circenv/error.hpp"
#include "circenv/vec2.hpp"

namespace circenv {

/// 17 significant digits: parsing the text gives back the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header) : os_(os) {
    bool first = true;
    for (auto h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) os_ << ',';
      os_ << format_double(v);
      first = false;
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;  // 1-based source line of each row

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t c = line.find(',', start);
    out.push_back(trim(line.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start)));
    if (c == std::string_view::npos) break;
    start = c + 1;
  }
  return out;
}

}  // namespace detail

/// Comma separated table with a header row; blank lines are skipped.
inline CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_commas(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no, 1);
    table.rows.push_back(std::move(cells));
    table.row_lines.push_back(line_no);
  }
  return table;
}

inline double parse_double(const std::string& s, int line, int column) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto res = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("not a number: '" + s + "'", line, column);
  return v;
}

struct SampledCurve {
  std::vector<double> t;
  std::vector<Vec2> points;
};

inline void write_curve_csv(std::ostream& os, const SampledCurve& c) {
  CsvWriter w(os, {"t", "x", "y"});
  for (std::size_t i = 0; i < c.t.size(); ++i) w.row({c.t[i], c.points[i].x, c.points[i].y});
}

inline SampledCurve read_curve_csv(std::istream& is) {
  const CsvTable table = read_csv(is);
  const int ct = table.column("t"), cx = table.column("x"), cy = table.column("y");
  if (ct < 0 || cx < 0 || cy < 0) throw ParseError("curve CSV needs columns t,x,y", 1, 1);
  SampledCurve c;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int line = table.row_lines[r];
    c.t.push_back(parse_double(table.rows[r][ct], line, ct + 1));
    c.points.push_back({parse_double(table.rows[r][cx], line, cx + 1),
                        parse_double(table.rows[r][cy], line, cy + 1)});
  }
  return c;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace circenv
