#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace lf {

/// Mixes a master seed, a stage label and an index into an independent stream key.
/// Every stage of the pipeline draws from its own key so that stages can be rerun
/// in isolation and still see the same numbers.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::string_view stage, std::uint64_t index = 0)
      : engine_(derive_seed(master, stage, index)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::vector<double> normal_vector(std::size_t n);
  void fill_normal(std::vector<double>& out);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace lf
