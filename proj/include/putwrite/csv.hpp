#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace putwrite {

/// Raised for malformed input files. `row` is the 1-based data row (header
/// excluded), 0 when the error is not tied to a row.
class DataError : public std::runtime_error {
 public:
  DataError(std::string file, std::size_t row, const std::string& what);

  const std::string& file() const { return file_; }
  std::size_t row() const { return row_; }

 private:
  std::string file_;
  std::size_t row_;
};

/// Minimal comma-separated reader: header row, no embedded commas or quotes.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t column(std::string_view name) const;

  /// Advances to the next non-empty row; false at end of file.
  bool next();
  std::size_t row_number() const { return row_; }
  const std::string& field(std::size_t col) const;
  double number(std::size_t col) const;

  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::string file_;
  std::vector<std::string> lines_;
  std::size_t cursor_ = 0;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
  std::size_t row_ = 0;
};

std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace putwrite
