#pragma once

// CSV tables with a header row and round-trip number formatting, gnuplot
// script emission, and file output.

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wirewall/error.hpp"

namespace wirewall::io {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Quotes a field when it contains a comma, quote, CR or LF; inner quotes doubled.
inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

using Cell = std::variant<double, long long, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw Error(ErrorKind::domain, "CSV table needs at least one column");
  }

  void add_row(std::vector<Cell> row) {
    if (row.size() != header_.size())
      throw Error(ErrorKind::domain, "CSV row has " + std::to_string(row.size()) + " fields, header has " +
                                         std::to_string(header_.size()));
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Lines end with CRLF.
  std::string str() const {
    std::string out;
    auto line = [&](const auto& fields, auto&& fmt) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fmt(fields[i]);
      }
      out += "\r\n";
    };
    line(header_, [](const std::string& s) { return quote_field(s); });
    for (const auto& r : rows_) line(r, [](const Cell& c) { return format_cell(c); });
    return out;
  }

  static std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return quote_field(std::get<std::string>(c));
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Writes `content` to `path`, creating parent directories. I/O failures are
/// reported with the system message.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::io, path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, path.string() + ": " + std::strerror(errno));
  out << content;
  out.close();
  if (!out) throw Error(ErrorKind::io, path.string() + ": write failed");
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  if (t.empty()) throw Error(ErrorKind::domain, "refusing to write an empty table to " + path.string());
  write_file(path, t.str());
}

struct PlotSeries {
  int x_column{1};  // 1-based CSV columns
  int y_column{2};
  std::string title;
  std::string style{"linespoints"};
};

struct PlotSpec {
  std::string csv;     // file name relative to the script
  std::string output;  // image file name
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logscale{true};
  std::vector<PlotSeries> series;
  std::vector<std::string> functions;  // extra gnuplot expressions in x, drawn as lines
};

inline std::string gnuplot_string(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

/// Script for `gnuplot script.gp` run from the directory holding the CSV.
inline std::string gnuplot_script(const PlotSpec& p) {
  if (p.series.empty() && p.functions.empty()) throw Error(ErrorKind::domain, "plot has no series");
  std::ostringstream s;
  s << "set terminal pngcairo size 800,600\n";
  s << "set output " << gnuplot_string(p.output) << "\n";
  s << "set datafile separator ','\n";
  if (!p.title.empty()) s << "set title " << gnuplot_string(p.title) << "\n";
  s << "set xlabel " << gnuplot_string(p.xlabel) << "\n";
  s << "set ylabel " << gnuplot_string(p.ylabel) << "\n";
  if (p.logscale) s << "set logscale xy\n";
  s << "set key top left\n";
  s << "plot ";
  bool first = true;
  for (const auto& ser : p.series) {
    if (!first) s << ", \\\n     ";
    first = false;
    s << gnuplot_string(p.csv) << " every ::1 using " << ser.x_column << ":" << ser.y_column << " with "
      << ser.style << " title " << gnuplot_string(ser.title);
  }
  for (const auto& f : p.functions) {
    if (!first) s << ", \\\n     ";
    first = false;
    s << f;
  }
  s << "\n";
  return s.str();
}

}  // namespace wirewall::io
