#include "ssp/csv.hpp"

#include <filesystem>

#include "ssp/common.hpp"

namespace ssp {

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : f_(nullptr), n_cols_(header.size()) {
  if (header.empty()) throw ConfigError("csv: empty header");
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) throw ConfigError("csv: cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i)
    std::fprintf(f_, "%s%s", header[i].c_str(),
                 i + 1 == header.size() ? "\n" : ",");
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

std::string CsvWriter::fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_)
    throw ConfigError("csv: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i)
    std::fprintf(f_, "%s%s", fmt(values[i]).c_str(),
                 i + 1 == values.size() ? "\n" : ",");
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_)
    throw ConfigError("csv: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i)
    std::fprintf(f_, "%s%s", cells[i].c_str(),
                 i + 1 == cells.size() ? "\n" : ",");
}

}  // namespace ssp
