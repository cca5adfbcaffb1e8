#include "latentflow/fvm/field_io.hpp"

#include <fstream>
#include <stdexcept>

#include "latentflow/common/binary_io.hpp"

namespace lf::fvm {

void write_field(std::ostream& os, const ScalarField2D& field) {
  binio::write_magic(os, "LDF2");
  binio::write<std::uint32_t>(os, kFieldVersion);
  binio::write<std::uint32_t>(os, static_cast<std::uint32_t>(field.nx()));
  binio::write<std::uint32_t>(os, static_cast<std::uint32_t>(field.ny()));
  binio::write<double>(os, field.dx());
  binio::write<double>(os, field.dy());
  for (double v : field.values()) binio::write<double>(os, v);
  if (!os) throw std::runtime_error("field: write failed");
}

ScalarField2D read_field(std::istream& is, const std::string& origin) {
  binio::expect_magic(is, "LDF2", origin);
  const auto version = binio::read<std::uint32_t>(is, origin + " version");
  if (version != kFieldVersion)
    throw std::runtime_error(origin + ": unsupported field version " + std::to_string(version));
  const auto nx = binio::read<std::uint32_t>(is, origin + " nx");
  const auto ny = binio::read<std::uint32_t>(is, origin + " ny");
  const auto dx = binio::read<double>(is, origin + " dx");
  const auto dy = binio::read<double>(is, origin + " dy");
  std::vector<double> values(static_cast<std::size_t>(nx) * ny);
  for (double& v : values) v = binio::read<double>(is, origin + " values");
  return ScalarField2D(nx, ny, dx, dy, std::move(values));
}

void save_field(const std::filesystem::path& path, const ScalarField2D& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_field(os, field);
}

ScalarField2D load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open field file " + path.string());
  return read_field(is, path.string());
}

}  // namespace lf::fvm
