#include "specbayes/csv_loader.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace specbayes {

std::vector<std::string> parse_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& response_column,
                         const MissingPolicy& policy) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv_dataset: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv_dataset: " + path.string() + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = parse_csv_record(line);
  for (auto& h : header) h = trim(h);
  const std::size_t ncols = header.size();

  const auto resp_it = std::find(header.begin(), header.end(), response_column);
  if (resp_it == header.end()) {
    throw std::runtime_error("load_csv_dataset: response column '" + response_column +
                             "' not found in " + path.string());
  }
  const auto resp = static_cast<std::size_t>(resp_it - header.begin());

  std::vector<std::vector<std::string>> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto rec = parse_csv_record(line);
    if (rec.size() != ncols) {
      throw std::runtime_error("load_csv_dataset: line " + std::to_string(line_no) + " has " +
                               std::to_string(rec.size()) + " fields, header has " +
                               std::to_string(ncols));
    }
    for (auto& f : rec) f = trim(f);
    cells.push_back(std::move(rec));
  }
  const std::size_t nrows = cells.size();
  if (nrows == 0) throw std::runtime_error("load_csv_dataset: no data rows in " + path.string());

  auto is_missing = [&](const std::string& v) {
    return std::find(policy.missing_tokens.begin(), policy.missing_tokens.end(), v) !=
           policy.missing_tokens.end();
  };

  // stage 1: columns
  std::vector<bool> keep(ncols, true);
  std::vector<std::string> dropped_by_name, dropped_by_missing;
  for (std::size_t j = 0; j < ncols; ++j) {
    if (j == resp) continue;
    if (std::find(policy.drop_columns.begin(), policy.drop_columns.end(), header[j]) !=
        policy.drop_columns.end()) {
      keep[j] = false;
      dropped_by_name.push_back(header[j]);
      continue;
    }
    std::size_t missing = 0;
    for (const auto& row : cells) missing += is_missing(row[j]) ? 1 : 0;
    const double fraction = static_cast<double>(missing) / static_cast<double>(nrows);
    if (fraction > policy.column_missing_threshold) {
      keep[j] = false;
      dropped_by_missing.push_back(header[j]);
    }
  }

  // stage 2: rows
  std::vector<std::size_t> kept_rows;
  for (std::size_t i = 0; i < nrows; ++i) {
    bool complete = true;
    for (std::size_t j = 0; j < ncols && complete; ++j) {
      if (keep[j] && is_missing(cells[i][j])) complete = false;
    }
    if (complete) kept_rows.push_back(i);
  }

  std::vector<std::size_t> features;
  for (std::size_t j = 0; j < ncols; ++j)
    if (keep[j] && j != resp) features.push_back(j);
  if (kept_rows.empty()) throw std::runtime_error("load_csv_dataset: no rows survive cleansing");
  if (features.empty()) throw std::runtime_error("load_csv_dataset: no feature columns survive cleansing");

  Dataset d;
  d.X.resize(static_cast<Index>(kept_rows.size()), static_cast<Index>(features.size()));
  d.y.resize(static_cast<Index>(kept_rows.size()));
  for (std::size_t r = 0; r < kept_rows.size(); ++r) {
    const auto& row = cells[kept_rows[r]];
    double v = 0.0;
    if (!parse_number(row[resp], v)) {
      throw std::runtime_error("load_csv_dataset: non-numeric response '" + row[resp] + "' in data row " +
                               std::to_string(kept_rows[r] + 1));
    }
    d.y(static_cast<Index>(r)) = v;
    for (std::size_t f = 0; f < features.size(); ++f) {
      const auto& text = row[features[f]];
      if (!parse_number(text, v)) {
        throw std::runtime_error("load_csv_dataset: non-numeric value '" + text + "' in column '" +
                                 header[features[f]] + "', data row " + std::to_string(kept_rows[r] + 1));
      }
      d.X(static_cast<Index>(r), static_cast<Index>(f)) = v;
    }
  }
  for (auto j : features) d.feature_names.push_back(header[j]);
  d.provenance = {{"source", "csv"},
                  {"path", path.string()},
                  {"response_column", response_column},
                  {"raw_rows", nrows},
                  {"raw_feature_columns", ncols - 1},
                  {"dropped_columns_by_name", dropped_by_name},
                  {"dropped_columns_by_missing", dropped_by_missing},
                  {"dropped_column_count", dropped_by_name.size() + dropped_by_missing.size()},
                  {"dropped_row_count", nrows - kept_rows.size()},
                  {"column_missing_threshold", policy.column_missing_threshold}};
  return d;
}

}  // namespace specbayes
