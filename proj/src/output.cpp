#include "dynelab/output.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

namespace dynelab {

std::string format_double(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string csv_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    return format_double(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    return std::to_string(*i);
  }
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) {
    return std::to_string(*u);
  }
  return csv_escape(std::get<std::string>(cell));
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    return *i;
  }
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) {
    return *u;
  }
  return std::get<std::string>(cell);
}

}  // namespace

void write_table(const Table& table, OutputFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open output file: " + path.string());
  }
  if (format == OutputFormat::Csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c == 0 ? "" : ",") << csv_escape(table.columns[c]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c == 0 ? "" : ",") << csv_cell(row[c]);
      }
      out << '\n';
    }
  } else {
    for (const auto& row : table.rows) {
      nlohmann::ordered_json line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        line[table.columns[c]] = json_cell(row[c]);
      }
      out << line.dump() << '\n';
    }
  }
  out.flush();
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::filesystem::path table_path(const std::filesystem::path& dir,
                                 const std::string& stem, OutputFormat format) {
  return dir / (stem + "." + format_name(format));
}

}  // namespace dynelab
