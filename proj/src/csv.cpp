#include "excite/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace excite {

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) {
    return raw;
  }
  std::string quoted = "\"";
  for (const char c : raw) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

CsvFile::CsvFile(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
}

void CsvFile::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out_ << ',';
    }
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
}

void CsvFile::close() {
  out_.close();
  if (out_.fail()) {
    throw std::runtime_error("error writing " + path_.string());
  }
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string() + " for reading");
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool had_data = false;
  char c;
  while (in.get(c)) {
    had_data = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      had_data = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (had_data) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace excite
