#pragma once

// Named columns of doubles, written as CSV with a header row.

#include <filesystem>
#include <string>
#include <vector>

namespace hqc {

struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values);
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws ErrorCode::invalid_argument for an unknown name.
  const std::vector<double>& column(const std::string& name) const;
};

/// 17 significant digits ("%.17g"), so every value round-trips exactly.
std::string format_double(double v);

std::string to_csv(const Table& t);
void write_csv(const Table& t, const std::filesystem::path& path);

/// Writes `text` to `path`, throwing ErrorCode::io on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hqc
