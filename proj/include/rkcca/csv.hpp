#pragma once

#include "rkcca/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rkcca {

/// Leading `# key: value` comment lines of a CSV file.
struct CsvMeta {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
};

struct CsvTable {
  CsvMeta meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws InputError when absent.
  std::size_t column(const std::string& name) const;
};

/// Shortest text that parses back to exactly `v` ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double v);
double parse_double(const std::string& text);

/// Comma-separated, LF line ends, no quoting (cells may not contain commas
/// or newlines).
std::string render_csv(const CsvTable& table);
/// Only the leading comment header of a CSV or sectioned file.
CsvMeta parse_meta(const std::string& text);
CsvTable parse_csv(const std::string& text);

/// Reads/writes whole files; failures throw IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

/// Every cell parsed as a number.
Matrix to_matrix(const CsvTable& table);
CsvTable from_matrix(const Matrix& M, const std::vector<std::string>& columns);
/// "x1", "x2", ... style column names.
std::vector<std::string> numbered_columns(const std::string& prefix, Index count);

/// Text container made of `[name]` sections, each holding a CSV body.
/// The comment header precedes the first section.
struct SectionedFile {
  CsvMeta meta;
  std::vector<std::pair<std::string, CsvTable>> sections;

  const CsvTable& section(const std::string& name) const;
  bool has(const std::string& name) const;
};

std::string render_sections(const SectionedFile& file);
SectionedFile parse_sections(const std::string& text);

}  // namespace rkcca
