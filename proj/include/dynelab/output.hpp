#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "dynelab/config.hpp"

namespace dynelab {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest decimal string that round-trips back to the same double.
std::string format_double(double value);

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// CSV with a header row, or one JSON object per line with the same field
// names. Numbers keep full round-trip precision in both formats.
void write_table(const Table& table, OutputFormat format,
                 const std::filesystem::path& path);

std::filesystem::path table_path(const std::filesystem::path& dir,
                                 const std::string& stem, OutputFormat format);

}  // namespace dynelab
