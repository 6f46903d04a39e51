#include "rkcca/csv.hpp"

#include "rkcca/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rkcca {

void CsvMeta::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries.emplace_back(key, value);
}

std::optional<std::string> CsvMeta::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InputError("missing CSV column '" + name + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = text.data();
  if (!text.empty() && text[0] == '+') ++first;
  const auto res = std::from_chars(first, text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || first == text.data() + text.size()) {
    throw InputError("not a number: '" + text + "'");
  }
  return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

void check_cell(const std::string& cell) {
  if (cell.find_first_of(",\n\r") != std::string::npos) {
    throw ContractError("CSV cell contains a separator: '" + cell + "'");
  }
}

void render_meta(std::ostringstream& os, const CsvMeta& meta) {
  for (const auto& [k, v] : meta.entries) {
    if (v.find('\n') != std::string::npos) throw ContractError("header value spans lines: " + k);
    os << "# " << k << ": " << v << '\n';
  }
}

void render_body(std::ostringstream& os, const CsvTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    check_cell(table.columns[i]);
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ContractError("CSV row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      check_cell(row[i]);
      os << (i ? "," : "") << row[i];
    }
    os << '\n';
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

bool parse_meta_line(const std::string& line, CsvMeta& meta) {
  if (line.empty() || line[0] != '#') return false;
  std::string body = line.substr(1);
  if (!body.empty() && body[0] == ' ') body.erase(0, 1);
  const auto colon = body.find(": ");
  if (colon == std::string::npos) {
    meta.entries.emplace_back(body, "");
  } else {
    meta.entries.emplace_back(body.substr(0, colon), body.substr(colon + 2));
  }
  return true;
}

// Parses header + rows from lines[begin, end); blank lines are skipped.
CsvTable parse_body(const std::vector<std::string>& lines, std::size_t begin, std::size_t end) {
  CsvTable t;
  bool have_header = false;
  for (std::size_t i = begin; i < end; ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (!have_header) {
      t.columns = split_line(line);
      have_header = true;
      continue;
    }
    auto cells = split_line(line);
    if (cells.size() != t.columns.size()) {
      throw InputError("CSV line " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw InputError("CSV body has no header row");
  return t;
}

}  // namespace

std::string render_csv(const CsvTable& table) {
  std::ostringstream os;
  render_meta(os, table.meta);
  render_body(os, table);
  return os.str();
}

CsvMeta parse_meta(const std::string& text) {
  CsvMeta meta;
  for (const auto& line : lines_of(text)) {
    if (!parse_meta_line(line, meta)) break;
  }
  return meta;
}

CsvTable parse_csv(const std::string& text) {
  const auto lines = lines_of(text);
  CsvMeta meta;
  std::size_t i = 0;
  while (i < lines.size() && parse_meta_line(lines[i], meta)) ++i;
  CsvTable t = parse_body(lines, i, lines.size());
  t.meta = std::move(meta);
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path)); }

void write_csv(const std::string& path, const CsvTable& table) { write_file(path, render_csv(table)); }

Matrix to_matrix(const CsvTable& table) {
  const Index r = static_cast<Index>(table.rows.size());
  const Index c = static_cast<Index>(table.columns.size());
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      M(i, j) = parse_double(table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  return M;
}

CsvTable from_matrix(const Matrix& M, const std::vector<std::string>& columns) {
  if (static_cast<Index>(columns.size()) != M.cols()) throw ContractError("from_matrix: column count mismatch");
  CsvTable t;
  t.columns = columns;
  t.rows.reserve(static_cast<std::size_t>(M.rows()));
  for (Index i = 0; i < M.rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(columns.size());
    for (Index j = 0; j < M.cols(); ++j) row.push_back(format_double(M(i, j)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> numbered_columns(const std::string& prefix, Index count) {
  std::vector<std::string> names;
  for (Index i = 1; i <= count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

const CsvTable& SectionedFile::section(const std::string& name) const {
  for (const auto& [k, t] : sections) {
    if (k == name) return t;
  }
  throw InputError("missing section [" + name + "]");
}

bool SectionedFile::has(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.first == name) return true;
  }
  return false;
}

std::string render_sections(const SectionedFile& file) {
  std::ostringstream os;
  render_meta(os, file.meta);
  for (const auto& [name, table] : file.sections) {
    os << '[' << name << "]\n";
    render_body(os, table);
  }
  return os.str();
}

SectionedFile parse_sections(const std::string& text) {
  const auto lines = lines_of(text);
  SectionedFile f;
  std::size_t i = 0;
  while (i < lines.size() && parse_meta_line(lines[i], f.meta)) ++i;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    if (line.empty()) {
      ++i;
      continue;
    }
    if (line.front() != '[' || line.back() != ']') throw InputError("expected [section] at line " + std::to_string(i + 1));
    const std::string name = line.substr(1, line.size() - 2);
    std::size_t end = i + 1;
    while (end < lines.size() && !(lines[end].size() > 1 && lines[end].front() == '[' && lines[end].back() == ']')) ++end;
    f.sections.emplace_back(name, parse_body(lines, i + 1, end));
    i = end;
  }
  return f;
}

}  // namespace rkcca
