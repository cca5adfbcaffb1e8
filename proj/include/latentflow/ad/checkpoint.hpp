#pragma once

#include <filesystem>
#include <iosfwd>

#include "latentflow/ad/params.hpp"

namespace lf::ad {

// LDAD layout, little-endian:
//   "LDAD" | u32 version | u32 tensor count |
//   per tensor: u16 name length, UTF-8 name, u8 rank, u32 extents..., f64 values...
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const ParameterSet& params);
ParameterSet read_checkpoint(std::istream& is, const std::string& origin = "<stream>");

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params);
ParameterSet load_checkpoint(const std::filesystem::path& path);

}  // namespace lf::ad
