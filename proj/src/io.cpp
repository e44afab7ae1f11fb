#include "farfield/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "farfield/errors.hpp"

namespace farfield {

namespace fs = std::filesystem;

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw InvalidInput("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw InvalidInput("not a number: '" + text + "'");
  return v;
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  out << "# farfield-csv v" << kCsvVersion << ' ' << schema << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  const std::string prefix = "# farfield-csv v";
  if (!std::getline(in, line) || line.rfind(prefix, 0) != 0) throw InvalidInput("missing farfield-csv header line");
  const std::string rest = line.substr(prefix.size());
  const auto space = rest.find(' ');
  if (space == std::string::npos || std::stoi(rest.substr(0, space)) != kCsvVersion) {
    throw InvalidInput("unsupported csv version: " + line);
  }
  table.schema = rest.substr(space + 1);
  if (!std::getline(in, line)) throw InvalidInput("missing csv column line");
  table.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_number(cell));
    if (row.size() != table.columns.size()) throw InvalidInput("csv row width mismatch");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace farfield
