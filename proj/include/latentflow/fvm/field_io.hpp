#pragma once

#include <filesystem>
#include <iosfwd>

#include "latentflow/fvm/field.hpp"

namespace lf::fvm {

// LDF2 layout, little-endian:
//   "LDF2" | u32 version | u32 nx | u32 ny | f64 dx | f64 dy | nx*ny f64 row-major
inline constexpr std::uint32_t kFieldVersion = 1;

void write_field(std::ostream& os, const ScalarField2D& field);
ScalarField2D read_field(std::istream& is, const std::string& origin = "<stream>");

void save_field(const std::filesystem::path& path, const ScalarField2D& field);
ScalarField2D load_field(const std::filesystem::path& path);

}  // namespace lf::fvm
