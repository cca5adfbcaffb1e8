#include "latentflow/io/csv.hpp"

#include <sstream>
#include <stdexcept>

#include "latentflow/synth/dataset.hpp"

namespace lf::io {

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), os_(path) {
  if (!os_) throw std::runtime_error("cannot write " + path.string());
}

std::string CsvWriter::cell(double v) { return synth::format_double(v); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].find_first_of(",\n") != std::string::npos)
      throw std::invalid_argument("CSV cell contains a separator: '" + cells[k] + "'");
    os_ << (k ? "," : "") << cells[k];
  }
  os_ << '\n';
  if (!os_) throw std::runtime_error("write failed: " + path_.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    table.push_back(std::move(cells));
  }
  return table;
}

void write_grid_csv(const std::filesystem::path& path, const fvm::ScalarField2D& f) {
  CsvWriter w(path);
  for (std::size_t j = 0; j < f.ny(); ++j) {
    std::vector<std::string> cells(f.nx());
    for (std::size_t i = 0; i < f.nx(); ++i) cells[i] = CsvWriter::cell(f(i, j));
    w.row(cells);
  }
}

fvm::ScalarField2D read_grid_csv(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  if (t.empty() || t.front().empty()) throw std::runtime_error(path.string() + ": empty grid");
  const std::size_t nx = t.front().size(), ny = t.size();
  std::vector<double> v(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    if (t[j].size() != nx) throw std::runtime_error(path.string() + ": ragged grid row " + std::to_string(j));
    for (std::size_t i = 0; i < nx; ++i) v[j * nx + i] = synth::parse_double(t[j][i], path.string());
  }
  return fvm::ScalarField2D(nx, ny, 1.0, 1.0, std::move(v));
}

}  // namespace lf::io
