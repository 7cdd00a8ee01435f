#pragma once

// One result table, written as CSV, gnuplot data or JSON. Numbers go out
// with 17 significant digits through std::to_chars, so the text does not
// depend on the locale.

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace kgml::cli {

using Cell = std::variant<double, long, std::string>;

enum class Format { csv, json, gnuplot };

inline std::string number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

struct Table {
  std::string command;
  std::vector<std::string> notes;  // '#' lines in text formats, "notes" in JSON
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
    rows.push_back(std::move(row));
  }
};

namespace detail {

inline std::string text(const Cell& c, bool quote) {
  if (auto d = std::get_if<double>(&c)) return number(*d);
  if (auto l = std::get_if<long>(&c)) return std::to_string(*l);
  const auto& s = std::get<std::string>(c);
  return quote ? "\"" + s + "\"" : s;
}

inline nlohmann::ordered_json json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d == 0.0 ? 0.0 : *d;
  }
  if (auto l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

}  // namespace detail

inline void write(std::ostream& os, const Table& t, Format f) {
  if (f == Format::json) {
    nlohmann::ordered_json j;
    j["command"] = t.command;
    j["notes"] = t.notes;
    j["columns"] = t.columns;
    auto records = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json r;
      for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = detail::json(row[i]);
      records.push_back(std::move(r));
    }
    j["records"] = std::move(records);
    os << j.dump(2) << '\n';
    return;
  }
  os << "# kgml " << t.command << '\n';
  for (const auto& n : t.notes) os << "# " << n << '\n';
  const char sep = f == Format::csv ? ',' : ' ';
  if (f == Format::gnuplot) os << "# ";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? std::string(1, sep) : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? std::string(1, sep) : "") << detail::text(row[i], f == Format::gnuplot);
    os << '\n';
  }
}

}  // namespace kgml::cli
