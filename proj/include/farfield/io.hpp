#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace farfield {

/// Writes via a temporary sibling file and rename, creating parent directories.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Throws InvalidInput when the file cannot be read.
std::string read_text(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double; "inf", "-inf", "nan" otherwise.
std::string format_number(double value);
double parse_number(const std::string& text);

/// Plain numeric table with a versioned schema comment ("# farfield-csv v1 <schema>").
struct CsvTable {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_string() const;
  static CsvTable parse(const std::string& text);
};

inline constexpr int kCsvVersion = 1;

}  // namespace farfield
