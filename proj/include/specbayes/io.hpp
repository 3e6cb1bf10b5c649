#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace specbayes {

/// Shortest decimal form that round-trips to the same double, so CSV
/// bodies are byte-stable across reruns.
std::string format_double(double x);

/// Header-first CSV writer. Fields are quoted only when they contain a
/// separator, quote or newline.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void write_row(const std::vector<std::string>& fields);
  std::size_t columns() const { return columns_; }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace specbayes
