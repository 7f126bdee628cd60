#pragma once
#include <string>
#include <vector>

#include "vendor_json.hpp"

namespace nhfp {

/// Format a double with 17 significant digits (bit-stable round trip).
std::string format_double(double v);

/// CSV file with a '#'-prefixed JSON header line. Rows are written in
/// call order; writers are expected to emit a deterministic order.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const nlohmann::json& header,
            const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  /// Mixed row: strings are written verbatim.
  void raw_row(const std::vector<std::string>& fields);
  /// Trailing '#'-prefixed JSON line (summary blocks).
  void comment_json(const std::string& key, const nlohmann::json& value);

 private:
  struct Impl;
  Impl* impl_;
};

/// Read back the JSON header of a file written by CsvWriter.
nlohmann::json read_csv_header(const std::string& path);

}  // namespace nhfp
