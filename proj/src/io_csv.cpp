#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xreg/errors.hpp"
#include "xreg/io.hpp"

namespace xreg::io {
namespace {

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RawCsv read_raw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  RawCsv raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (raw.header.empty()) {
      raw.header = std::move(fields);
      continue;
    }
    if (fields.size() != raw.header.size()) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(raw.header.size()));
    }
    raw.rows.push_back(std::move(fields));
  }
  if (raw.header.empty()) throw DataError(path.string() + ": empty file");
  if (raw.rows.empty()) throw DataError(path.string() + ": no data rows");
  return raw;
}

double parse_cell(const std::string& text, std::size_t row, const std::string& column,
                  const std::filesystem::path& path) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError(path.string() + ": row " + std::to_string(row) + ", column '" + column +
                    "': not a finite number ('" + text + "')");
  }
  return value;
}

// Data rows are reported 1-based counting the header as row 1.
Matrix parse_columns(const RawCsv& raw, const std::vector<std::size_t>& columns,
                     const std::filesystem::path& path) {
  Matrix out(raw.rows.size(), columns.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out(r, c) = parse_cell(raw.rows[r][columns[c]], r + 2, raw.header[columns[c]], path);
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::size_t resolve_column(const std::vector<std::string>& header, const std::string& ref) {
  const auto it = std::find(header.begin(), header.end(), ref);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  if (!ref.empty() && std::all_of(ref.begin(), ref.end(), ::isdigit)) {
    const auto idx = static_cast<std::size_t>(std::stoull(ref));
    if (idx < header.size()) return idx;
  }
  throw DataError("no column '" + ref + "' in header (" + join(header) + ")");
}

Table load_table_csv(const std::filesystem::path& path) {
  const RawCsv raw = read_raw(path);
  std::vector<std::size_t> all(raw.header.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return Table{raw.header, parse_columns(raw, all, path)};
}

Dataset load_dataset_csv(const std::filesystem::path& path, const std::string& target,
                         const std::vector<std::string>& features) {
  const RawCsv raw = read_raw(path);
  const std::size_t target_col = resolve_column(raw.header, target);
  std::vector<std::size_t> feature_cols;
  if (features.empty()) {
    for (std::size_t i = 0; i < raw.header.size(); ++i) {
      if (i != target_col) feature_cols.push_back(i);
    }
  } else {
    for (const auto& f : features) {
      const std::size_t col = resolve_column(raw.header, f);
      if (col == target_col) throw DataError("feature column '" + f + "' is the target");
      feature_cols.push_back(col);
    }
  }
  if (feature_cols.empty()) throw DataError(path.string() + ": no feature columns");
  Dataset data;
  data.x = parse_columns(raw, feature_cols, path);
  const Matrix y = parse_columns(raw, {target_col}, path);
  data.y.assign(y.values().begin(), y.values().end());
  data.validate();
  return data;
}

Dataset load_dataset(const CsvSource& source) {
  return load_dataset_csv(source.path, source.target, source.features);
}

void write_table_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << join(table.header) << '\n';
  for (std::size_t r = 0; r < table.values.rows(); ++r) {
    for (std::size_t c = 0; c < table.values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(table.values(r, c));
    }
    out << '\n';
  }
  if (!out) throw RuntimeError("error while writing '" + path.string() + "'");
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                       const std::vector<std::string>& names) {
  Table table;
  if (names.empty()) {
    for (std::size_t j = 0; j < data.d(); ++j) table.header.push_back("x" + std::to_string(j + 1));
    table.header.push_back("y");
  } else {
    if (names.size() != data.d() + 1) throw DataError("write_dataset_csv: need d + 1 column names");
    table.header = names;
  }
  table.values = Matrix(data.n(), data.d() + 1);
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.d(); ++j) table.values(i, j) = data.x(i, j);
    table.values(i, data.d()) = data.y[i];
  }
  write_table_csv(table, path);
}

}  // namespace xreg::io
