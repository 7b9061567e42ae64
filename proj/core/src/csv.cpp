#include "dwell/csv.hpp"

#include <cmath>
#include <cstdio>

namespace dwell {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw ConfigError("csv: cannot open '" + path + "' for writing");
}

void CsvWriter::metadata(const std::string& key, const std::string& value) {
  if (header_written_)
    throw Error("csv: metadata must precede the header row");
  out_ << "# " << key << "=" << value << "\n";
}

void CsvWriter::metadata(const std::string& key, double value) {
  metadata(key, format_double(value));
}

std::string CsvWriter::escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << escape(columns[i]);
  out_ << "\n";
  header_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i)
    out_ << (i ? "," : "") << escape(fields[i]);
  out_ << "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ",";
    if (!std::isnan(values[i])) out_ << format_double(values[i]);
  }
  out_ << "\n";
}

KeyValueReport::KeyValueReport(const std::string& path) : out_(path) {
  if (!out_) throw ConfigError("report: cannot open '" + path + "' for writing");
}

void KeyValueReport::set(const std::string& key, const std::string& value) {
  out_ << key << "=" << value << "\n";
}

void KeyValueReport::set(const std::string& key, double value) {
  set(key, format_double(value));
}

void KeyValueReport::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dwell
