#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flowrecom::csv {

// Header-checked CSV table. Fields may be double-quoted; no embedded newlines.
struct Table {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

Table parse(std::string_view text, const std::string& source);
Table read_file(const std::filesystem::path& path);

// Throws ParseError unless the header starts with `expected` (extra trailing
// columns are allowed).
void require_header(const Table& table, const std::vector<std::string>& expected);

double to_double(const Table& table, std::size_t row, std::size_t col);
long long to_int(const Table& table, std::size_t row, std::size_t col);

std::string format_double(double value);

}  // namespace flowrecom::csv
