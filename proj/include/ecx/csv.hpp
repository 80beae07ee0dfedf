#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ecx/core_matrix.hpp"
#include "ecx/empirics.hpp"
#include "ecx/error.hpp"

namespace ecx {
namespace csv {

/// Shortest round-trip representation of a double (std::to_chars).
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

inline bool parse_int(const std::string& s, long& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

struct Row {
  std::size_t line_number;
  std::vector<std::string> fields;
};

/// Read a CSV with the exact expected header. Comment lines starting
/// with '#' and blank lines are skipped. Rows with the wrong field count
/// are collected as errors; the remaining rows are returned.
inline std::vector<Row> read_rows(const std::filesystem::path& path,
                                  const std::vector<std::string>& expected_header,
                                  std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());

  std::vector<Row> rows;
  std::string line;
  std::size_t line_number = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_number == 1 && line.size() >= 3 &&
        static_cast<unsigned char>(line[0]) == 0xEF)
      line.erase(0, 3);  // UTF-8 BOM
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (!saw_header) {
      if (fields != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i)
          want += (i ? "," : "") + expected_header[i];
        throw InputError(path.string() + ": expected header '" + want +
                         "', got '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != expected_header.size()) {
      errors.push_back("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(expected_header.size()) + " fields, got " +
                       std::to_string(fields.size()));
      continue;
    }
    rows.push_back({line_number, std::move(fields)});
  }
  if (!saw_header) throw InputError(path.string() + ": no data");
  return rows;
}

inline void throw_if_errors(const std::filesystem::path& path,
                            const std::vector<std::string>& errors) {
  if (errors.empty()) return;
  std::ostringstream msg;
  msg << path.string() << ": " << errors.size() << " malformed row(s):";
  const std::size_t shown = std::min<std::size_t>(errors.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg << "\n  " << errors[i];
  if (errors.size() > shown)
    msg << "\n  ... and " << errors.size() - shown << " more";
  throw InputError(msg.str());
}

}  // namespace detail

/// Trade data, header `year,country,product,value`. Every year in the
/// file becomes an independent table. Rows with a non-numeric or
/// negative value are rejected with their line number.
inline std::map<int, ExportTable> read_trade_csv(const std::filesystem::path& path) {
  std::vector<std::string> errors;
  const auto rows = detail::read_rows(path, {"year", "country", "product", "value"},
                                      errors);
  std::map<int, ExportTable> by_year;
  for (const auto& row : rows) {
    long year = 0;
    double value = 0.0;
    if (!detail::parse_int(row.fields[0], year)) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": non-integer year '" + row.fields[0] + "'");
      continue;
    }
    if (row.fields[1].empty() || row.fields[2].empty()) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": empty country or product code");
      continue;
    }
    if (!detail::parse_double(row.fields[3], value) || value < 0.0) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": non-numeric or negative value '" + row.fields[3] + "'");
      continue;
    }
    auto [it, inserted] = by_year.try_emplace(static_cast<int>(year),
                                              ExportTable(static_cast<int>(year)));
    (void)inserted;
    try {
      it->second.add(row.fields[1], row.fields[2], value);
    } catch (const InputError&) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": duplicate (country,product) within year " +
                       row.fields[0]);
    }
  }
  detail::throw_if_errors(path, errors);
  if (by_year.empty()) throw InputError(path.string() + ": no data");
  return by_year;
}

/// Per-country series, header `country,value`.
inline CountrySeries read_series_csv(const std::filesystem::path& path,
                                     const std::string& label = "", int year = 0) {
  std::vector<std::string> errors;
  const auto rows = detail::read_rows(path, {"country", "value"}, errors);
  CountrySeries series;
  series.label = label.empty() ? path.stem().string() : label;
  series.year = year;
  for (const auto& row : rows) {
    double value = 0.0;
    if (row.fields[0].empty()) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": empty country code");
      continue;
    }
    if (!detail::parse_double(row.fields[1], value)) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": non-numeric value '" + row.fields[1] + "'");
      continue;
    }
    if (!series.values.emplace(row.fields[0], value).second)
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": duplicate country '" + row.fields[0] + "'");
  }
  detail::throw_if_errors(path, errors);
  if (series.values.empty()) throw InputError(path.string() + ": no data");
  return series;
}

/// Product attributes, header `product,attribute`. Duplicate pairs fold
/// into the set.
inline ProductAttributeMap read_attributes_csv(const std::filesystem::path& path) {
  std::vector<std::string> errors;
  const auto rows = detail::read_rows(path, {"product", "attribute"}, errors);
  ProductAttributeMap map;
  for (const auto& row : rows) {
    if (row.fields[0].empty() || row.fields[1].empty()) {
      errors.push_back("line " + std::to_string(row.line_number) +
                       ": empty product or attribute id");
      continue;
    }
    map.attributes[row.fields[0]].insert(row.fields[1]);
  }
  detail::throw_if_errors(path, errors);
  if (map.attributes.empty()) throw InputError(path.string() + ": no data");
  return map;
}

}  // namespace csv
}  // namespace ecx
