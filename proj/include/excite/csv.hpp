#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace excite {

/// Formats a double with 17 significant digits ('.' decimal separator), so
/// the exact bit pattern survives a round trip; infinities print as
/// "inf"/"-inf", NaN as "nan".
std::string format_double(double value);

/// Quotes a field per RFC 4180 when it contains a comma, quote, or newline.
std::string csv_field(const std::string& raw);

/// Line-oriented CSV writer ('\n' line endings, RFC 4180 quoting).
class CsvFile {
 public:
  /// Throws std::runtime_error when the file cannot be opened.
  explicit CsvFile(const std::filesystem::path& path);

  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

/// Reads a whole CSV file back into rows of fields (handles quoted fields).
/// Throws std::runtime_error when the file cannot be read.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace excite
