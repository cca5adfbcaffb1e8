#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::io {

using CsvTable = std::vector<std::vector<std::string>>;

/// Comma-separated writer; doubles use the shortest round-trip form.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& cells);
  template <class... T>
  void values(const T&... cells) {
    row({cell(cells)...});
  }

  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v);
  static std::string cell(std::size_t v) { return std::to_string(v); }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

/// Plain split on commas; no quoting (none of our writers emit commas inside cells).
CsvTable read_csv(const std::filesystem::path& path);

/// Grid values, one CSV line per row j (j = 0 first), nx columns.
void write_grid_csv(const std::filesystem::path& path, const fvm::ScalarField2D& field);
fvm::ScalarField2D read_grid_csv(const std::filesystem::path& path);

}  // namespace lf::io
