#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace snls::app {

// Shortest form that round-trips ("%.17g").
std::string format_double(double v);

// CSV with a "# config_hash=<hash>" comment line before the header.
class CsvTable {
 public:
  CsvTable(std::string hash, std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& values);
  std::string str() const;
  int n_rows() const noexcept { return static_cast<int>(rows_.size()); }

 private:
  std::string hash_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

void ensure_directory(const std::string& dir);
void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& doc);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace snls::app
