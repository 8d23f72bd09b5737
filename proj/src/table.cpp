#include "hybridqc/table.hpp"

#include <cstdio>
#include <fstream>

#include "hybridqc/error.hpp"

namespace hqc {

void Table::add(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) {
    throw Error(ErrorCode::dimension_mismatch, "table column '" + name + "' has " + std::to_string(values.size()) +
                                                   " rows, expected " + std::to_string(rows()));
  }
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw Error(ErrorCode::invalid_argument, "table has no column '" + name + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.names.size(); ++j) {
    if (j) out += ',';
    out += t.names[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(t.columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Table& t, const std::filesystem::path& path) { write_text(path, to_csv(t)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

}  // namespace hqc
