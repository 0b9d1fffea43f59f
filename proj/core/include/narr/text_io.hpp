#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace narr {

std::ifstream open_input(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate, write, flush, check.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal form that parses back to the same double ('.' decimal,
/// locale independent).
std::string format_number(double v);
double parse_number(std::string_view s);

/// Comma-separated table with a header row. Fields containing a comma, a quote
/// or a newline are quoted RFC-4180 style.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index for `name`, if present.
  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;

  bool operator==(const CsvTable&) const = default;
};

std::string to_csv(const CsvTable& table);
/// Throws ParseError (with line number) on ragged rows or bad quoting.
CsvTable parse_csv(std::string_view text);

}  // namespace narr
