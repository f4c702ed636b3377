#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace qsd::cli {

/// 17 significant digits, so the text round-trips to the same double.
std::string format_double(double x);

/// RFC 4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

/// Writes CRLF-terminated RFC 4180 rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(const std::string& s);
  CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
  CsvWriter& operator<<(double x) { return *this << format_double(x); }
  CsvWriter& operator<<(long x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(std::size_t x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(int x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(bool b) { return *this << std::string(b ? "true" : "false"); }
  /// Ends the current row.
  void end_row();

 private:
  std::ofstream out_;
  std::string row_;
  bool first_ = true;
};

/// Splits RFC 4180 text into records (used by the tests and `compare`).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace qsd::cli
