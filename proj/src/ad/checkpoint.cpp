#include "latentflow/ad/checkpoint.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include "latentflow/common/binary_io.hpp"

namespace lf::ad {

void write_checkpoint(std::ostream& os, const ParameterSet& params) {
  binio::write_magic(os, "LDAD");
  binio::write<std::uint32_t>(os, kCheckpointVersion);
  binio::write<std::uint32_t>(os, static_cast<std::uint32_t>(params.count()));
  for (const std::string& name : params.names()) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max())
      throw std::invalid_argument("checkpoint: parameter name too long");
    const Tensor& t = params.at(name);
    binio::write<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    binio::write<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
    for (std::size_t e : t.shape()) binio::write<std::uint32_t>(os, static_cast<std::uint32_t>(e));
    for (double v : t.values()) binio::write<double>(os, v);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

ParameterSet read_checkpoint(std::istream& is, const std::string& origin) {
  binio::expect_magic(is, "LDAD", origin);
  const auto version = binio::read<std::uint32_t>(is, origin + " version");
  if (version != kCheckpointVersion)
    throw std::runtime_error(origin + ": unsupported checkpoint version " + std::to_string(version));
  const auto count = binio::read<std::uint32_t>(is, origin + " tensor count");
  ParameterSet params;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto len = binio::read<std::uint16_t>(is, origin + " name length");
    std::string name(len, '\0');
    is.read(name.data(), len);
    if (!is) throw std::runtime_error("truncated input while reading " + origin + " tensor name");
    const auto rank = binio::read<std::uint8_t>(is, origin + " rank");
    if (rank == 0) throw std::runtime_error(origin + ": tensor '" + name + "' has rank 0");
    Shape shape(rank);
    for (auto& e : shape) e = binio::read<std::uint32_t>(is, origin + " extent");
    std::vector<double> values(numel(shape));
    for (double& v : values) v = binio::read<double>(is, origin + " values of '" + name + "'");
    params.add(name, Tensor(std::move(shape), std::move(values)));
  }
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_checkpoint(os, params);
}

ParameterSet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(is, path.string());
}

}  // namespace lf::ad
