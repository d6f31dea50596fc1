#include "flowrecom/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "flowrecom/error.hpp"

namespace flowrecom::csv {
namespace {

std::string where(const Table& t, std::size_t row) {
  return t.source + ":" + std::to_string(t.line_numbers.at(row));
}

std::vector<std::string> split_line(std::string_view line, const std::string& source,
                                    std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw Error(Errc::ParseError,
                source + ":" + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

Table parse(std::string_view text, const std::string& source) {
  Table table;
  table.source = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_line(line, source, line_no);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(Errc::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
    if (end == text.size()) break;
  }
  if (table.header.empty()) throw Error(Errc::ParseError, source + ": missing header");
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void require_header(const Table& table, const std::vector<std::string>& expected) {
  bool ok = table.header.size() >= expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = table.header[i] == expected[i];
  if (!ok) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw Error(Errc::ParseError, table.source + ":1: expected header " + want);
  }
}

double to_double(const Table& table, std::size_t row, std::size_t col) {
  const std::string& s = table.rows.at(row).at(col);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(Errc::ParseError, where(table, row) + ": column '" + table.header.at(col) +
                                      "' is not a number: '" + s + "'");
  }
  return value;
}

long long to_int(const Table& table, std::size_t row, std::size_t col) {
  const std::string& s = table.rows.at(row).at(col);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(Errc::ParseError, where(table, row) + ": column '" + table.header.at(col) +
                                      "' is not an integer: '" + s + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace flowrecom::csv
