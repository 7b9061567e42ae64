#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "dwell/errors.hpp"

namespace dwell {

/// Deterministic double formatting: %.17g round-trips bit-exactly and never
/// depends on locale state we do not set.
std::string format_double(double v);

/// RFC-4180-style writer.  Metadata lines ('# key=value') precede the header
/// row.  Numeric fields are never quoted; string fields are quoted only when
/// they contain a comma, quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void metadata(const std::string& key, const std::string& value);
  void metadata(const std::string& key, double value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

  /// Convenience for all-numeric rows; NaN encodes a masked cell and is
  /// emitted as an empty field.
  void row_numeric(const std::vector<double>& values);

  static std::string escape(const std::string& field);

 private:
  std::ofstream out_;
  bool header_written_ = false;
  std::string path_;
};

/// Small key=value report file, one entry per line, deterministic order.
class KeyValueReport {
 public:
  explicit KeyValueReport(const std::string& path);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);

 private:
  std::ofstream out_;
};

/// FNV-1a 64-bit hash, hex-encoded; used for config fingerprints in
/// run metadata.
std::string fnv1a_hex(const std::string& data);

}  // namespace dwell
