// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "moher/io.hpp"

namespace moher::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_line(std::string_view line, const std::string& path, std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError(path + ":" + std::to_string(lineno) + ": unterminated quoted field");
  out.push_back(trim(field));
  return out;
}

}  // namespace

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

void CsvTable::fail(std::size_t row, std::size_t col, const std::string& what) const {
  const std::string name = col < header.size() ? header[col] : std::to_string(col + 1);
  throw DataError(path + ":" + std::to_string(lines.at(row)) + ": column '" + name + "': " + what);
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) fail(row, col, "'" + s + "' is not a number");
  if (!std::isfinite(v)) fail(row, col, "value is not finite");
  return v;
}

long long CsvTable::integer(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) fail(row, col, "'" + s + "' is not an integer");
  return v;
}

CsvTable parse_csv(std::string_view text, std::string path_label) {
  CsvTable t;
  t.path = std::move(path_label);
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++lineno;
    pos = end + 1;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_line(line, t.path, lineno);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != t.header.size()) {
        throw DataError(t.path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                        " fields, found " + std::to_string(fields.size()));
      }
      t.rows.push_back(std::move(fields));
      t.lines.push_back(lineno);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw DataError(t.path + ": missing header row");
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  return out;
}

}  // namespace

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "epoch,train_mse,val_rmse,val_mape\n";
  for (const EpochRecord& r : history) {
    out << r.epoch << ',' << format_number(r.train_mse) << ',' << format_number(r.val_rmse) << ','
        << format_number(r.val_mape) << '\n';
  }
}

void write_metrics(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "method,split,rmse,mape,count\n";
  for (const MetricRow& r : rows) {
    out << r.method << ',' << r.split << ',' << format_number(r.metrics.rmse) << ','
        << format_number(r.metrics.mape) << ',' << r.metrics.count << '\n';
  }
}

}  // namespace moher::io
