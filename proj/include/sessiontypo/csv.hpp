#pragma once

// Minimal RFC 4180 reader/writer. Fields containing a comma, quote, CR or LF
// are quoted on output; embedded quotes are doubled.

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sessiontypo/error.hpp"

namespace sessiontypo::csv {

using Row = std::vector<std::string>;

inline std::string escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_row(const Row& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line.push_back(',');
    line += escape(row[i]);
  }
  line.push_back('\n');
  return line;
}

/// Parses a whole document. Blank lines are skipped; a trailing newline is
/// optional. Throws ParseError on an unterminated quoted field.
inline std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    if (!(row.empty() && field.empty() && !field_started)) {
      end_field();
      rows.push_back(std::move(row));
    }
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes)
    fail(ErrorCode::ParseError, "unterminated quoted field near line " + std::to_string(line));
  end_row();
  return rows;
}

/// Shortest "%.12g" rendering used for every real written to a CSV.
inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

}  // namespace sessiontypo::csv
