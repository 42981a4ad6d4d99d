#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace ssp {

// Deterministic CSV writer: doubles are rendered with %.17g so identical
// runs produce byte-identical files.  Throws ConfigError on IO failure.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  // Mixed row: strings are written verbatim (caller avoids commas).
  void row_mixed(const std::vector<std::string>& cells);

  static std::string fmt(double v);

 private:
  std::FILE* f_;
  std::size_t n_cols_;
};

}  // namespace ssp
