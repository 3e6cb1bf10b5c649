#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "specbayes/data_gen.hpp"

namespace specbayes {

/// Two-stage cleansing of a tabular file:
///   1. drop every feature column whose missing fraction exceeds
///      `column_missing_threshold` (default 0: any missing entry drops it),
///      plus the columns named in `drop_columns` (IDs, leakage columns);
///   2. drop every row that still has a missing entry.
/// The response column is never dropped in stage 1; rows with a missing
/// response go in stage 2.
struct MissingPolicy {
  double column_missing_threshold = 0.0;
  std::vector<std::string> drop_columns;
  std::vector<std::string> missing_tokens = {"", "NA", "N/A", "NaN", "nan", "null", "NULL"};
};

/// Parses one CSV record (RFC 4180 quoting).
std::vector<std::string> parse_csv_record(const std::string& line);

/// Loads a header-row CSV into a numeric Dataset. Provenance records the path,
/// dropped column names and counts and the dropped row count.
Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& response_column,
                         const MissingPolicy& policy = {});

}  // namespace specbayes
