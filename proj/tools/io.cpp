#include "snls/app/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "snls/errors.hpp"

namespace snls::app {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::string hash, std::vector<std::string> columns)
    : hash_(std::move(hash)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) fail(ErrorKind::kShapeMismatch, "CSV row width differs from header");
  std::string line;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) line += ',';
    line += cells[k];
  }
  rows_.push_back(std::move(line));
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

std::string CsvTable::str() const {
  std::string out = "# config_hash=" + hash_ + "\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (k > 0) out += ',';
    out += columns_[k];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kConfig, "cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kConfig, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::kConfig, "write to '" + path + "' failed");
}

void write_json(const std::string& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace snls::app
