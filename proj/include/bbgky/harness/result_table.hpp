#pragma once

// Typed result tables and their CSV / JSON forms. Reals are written as the
// shortest string that parses back to the same double.

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bbgky/error.hpp"

namespace bbgky::harness {

/// File could not be written or read.
class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& message)
      : Error(path.string() + ": " + message), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

enum class ColumnType { real, integer, text };

inline const char* to_string(ColumnType t) {
  switch (t) {
    case ColumnType::real: return "real";
    case ColumnType::integer: return "integer";
    case ColumnType::text: return "text";
  }
  return "?";
}

inline ColumnType column_type_from(const std::string& s) {
  if (s == "real") return ColumnType::real;
  if (s == "integer") return ColumnType::integer;
  if (s == "text") return ColumnType::text;
  throw PreconditionError("unknown column type '" + s + "'");
}

struct Column {
  std::string name;
  ColumnType type = ColumnType::real;
  bool operator==(const Column&) const = default;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json metadata = nlohmann::json::object();

  ResultTable() = default;
  explicit ResultTable(std::vector<Column> cols) : columns(std::move(cols)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw DimensionError("ResultTable: row has " + std::to_string(row.size()) + " cells, table has " +
                           std::to_string(columns.size()) + " columns");
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c].index() != static_cast<std::size_t>(columns[c].type))
        throw PreconditionError("ResultTable: cell type does not match column '" + columns[c].name + "'");
    rows.push_back(std::move(row));
  }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c].name == name) return c;
    throw PreconditionError("ResultTable: no column '" + name + "'");
  }
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw PreconditionError("not a number: '" + s + "'");
  return v;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

/// Splits CSV text into records (RFC 4180 quoting).
inline std::vector<std::vector<std::string>> csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      out.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw PreconditionError("csv: unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    out.push_back(std::move(record));
  }
  return out;
}

inline nlohmann::json json_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  return std::get<std::string>(cell);
}

}  // namespace detail

/// Header row plus one line per row, LF terminated.
inline std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_field(table.columns[c].name);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += detail::csv_field(detail::cell_text(row[c]));
    }
    out += '\n';
  }
  return out;
}

/// Parses CSV written by to_csv; the header must name exactly `columns`.
inline ResultTable from_csv(const std::string& text, const std::vector<Column>& columns) {
  const auto records = detail::csv_records(text);
  if (records.empty()) throw PreconditionError("csv: missing header row");
  ResultTable table(columns);
  const auto& header = records.front();
  if (header.size() != columns.size()) throw PreconditionError("csv: header has the wrong number of columns");
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (header[c] != columns[c].name) throw PreconditionError("csv: unexpected column '" + header[c] + "'");
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != columns.size())
      throw PreconditionError("csv: record " + std::to_string(r) + " has " + std::to_string(rec.size()) + " fields");
    std::vector<Cell> row;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      switch (columns[c].type) {
        case ColumnType::real: row.emplace_back(parse_double(rec[c])); break;
        case ColumnType::integer: row.emplace_back(static_cast<std::int64_t>(std::stoll(rec[c]))); break;
        case ColumnType::text: row.emplace_back(rec[c]); break;
      }
    }
    table.add_row(std::move(row));
  }
  return table;
}

/// {"metadata": {...}, "row_count": n, "columns": [{"name", "type", "values": [...]}]}
inline nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& row : table.rows) values.push_back(detail::json_cell(row[c]));
    cols.push_back({{"name", table.columns[c].name}, {"type", to_string(table.columns[c].type)}, {"values", values}});
  }
  return {{"metadata", table.metadata}, {"row_count", table.rows.size()}, {"columns", cols}};
}

inline ResultTable from_json(const nlohmann::json& j) {
  ResultTable table;
  table.metadata = j.at("metadata");
  const auto n = j.at("row_count").get<std::size_t>();
  for (const auto& col : j.at("columns")) {
    table.columns.push_back({col.at("name").get<std::string>(), column_type_from(col.at("type").get<std::string>())});
    if (col.at("values").size() != n) throw PreconditionError("json: column length differs from row_count");
  }
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<Cell> row;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& v = j.at("columns")[c].at("values")[r];
      switch (table.columns[c].type) {
        case ColumnType::real:
          row.emplace_back(v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>());
          break;
        case ColumnType::integer: row.emplace_back(v.get<std::int64_t>()); break;
        case ColumnType::text: row.emplace_back(v.get<std::string>()); break;
      }
    }
    table.add_row(std::move(row));
  }
  return table;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

/// A set of files that appear together or not at all: everything is written
/// to temporaries first, then renamed into place.
class AtomicWriteBatch {
 public:
  void add(std::filesystem::path path, std::string content) { items_.push_back({std::move(path), std::move(content)}); }

  std::vector<std::filesystem::path> commit() {
    std::vector<std::filesystem::path> temps;
    auto cleanup = [&] {
      std::error_code ec;
      for (const auto& t : temps) std::filesystem::remove(t, ec);
    };
    for (const auto& [path, content] : items_) {
      auto tmp = path;
      tmp += ".tmp";
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        cleanup();
        throw IoError(tmp, "cannot open for writing");
      }
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out) {
        cleanup();
        throw IoError(tmp, "write failed");
      }
    }
    std::vector<std::filesystem::path> written;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      std::error_code ec;
      std::filesystem::rename(temps[i], items_[i].first, ec);
      if (ec) {
        cleanup();
        throw IoError(items_[i].first, "rename failed: " + ec.message());
      }
      written.push_back(items_[i].first);
    }
    items_.clear();
    return written;
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> items_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bbgky::harness
