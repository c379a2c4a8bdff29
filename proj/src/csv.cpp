#include "putwrite/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace putwrite {

DataError::DataError(std::string file, std::size_t row, const std::string& what)
    : std::runtime_error(row > 0 ? file + ": row " + std::to_string(row) + ": " + what : file + ": " + what),
      file_(std::move(file)),
      row_(row) {}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

CsvReader::CsvReader(const std::filesystem::path& path) : file_(path.string()) {
  std::ifstream in(path);
  if (!in) throw DataError(file_, 0, "cannot open file");
  std::string line;
  while (std::getline(in, line)) lines_.push_back(std::move(line));
  while (cursor_ < lines_.size() && lines_[cursor_].find_first_not_of(" \t\r") == std::string::npos) ++cursor_;
  if (cursor_ == lines_.size()) throw DataError(file_, 0, "missing header row");
  header_ = split_csv_line(lines_[cursor_++]);
}

std::size_t CsvReader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw DataError(file_, 0, "missing column '" + std::string(name) + "'");
}

bool CsvReader::next() {
  while (cursor_ < lines_.size()) {
    const std::string& line = lines_[cursor_++];
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row_;
    fields_ = split_csv_line(line);
    if (fields_.size() != header_.size()) {
      fail("expected " + std::to_string(header_.size()) + " fields, found " + std::to_string(fields_.size()));
    }
    return true;
  }
  return false;
}

const std::string& CsvReader::field(std::size_t col) const { return fields_.at(col); }

double CsvReader::number(std::size_t col) const {
  const std::string& text = field(col);
  if (text.empty()) fail("empty numeric field '" + header_[col] + "'");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    fail("unparseable number '" + text + "' in column '" + header_[col] + "'");
  }
  return v;
}

void CsvReader::fail(const std::string& what) const { throw DataError(file_, row_, what); }

std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace putwrite
