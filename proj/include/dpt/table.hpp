#pragma once

#include <map>
#include <string>
#include <vector>

namespace dpt {

/// Numeric CSV with `# key=value` metadata lines above the header.
struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Numbers use the shortest round-trip form, so reading back is exact.
void write_table(const std::string& path, const Table& table);
Table read_table(const std::string& path);

}  // namespace dpt
