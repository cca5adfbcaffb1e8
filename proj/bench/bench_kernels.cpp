// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "latentflow/adjoint/adjoint.hpp"
#include "latentflow/ad/kernels.hpp"
#include "latentflow/common/rng.hpp"
#include "latentflow/fvm/assembly.hpp"
#include "latentflow/fvm/solver.hpp"
#include "latentflow/metrics/distribution.hpp"

namespace {

using namespace lf;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return rng.normal_vector(n);
}

fvm::ScalarField2D random_k(std::size_t n) {
  auto K = fvm::GridSpec{n, n}.field();
  Rng rng(11);
  for (double& v : K.values()) v = std::exp(rng.normal());
  return K;
}

template <bool Parallel>
void BM_Conv2dForward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto g = ad::kernels::make_conv_geom(16, c, 32, 32, c, 3, 3, 1, 1);
  const auto x = noise(g.input_size(), 1), w = noise(g.weight_size(), 2), b = noise(c, 3);
  std::vector<double> y(g.output_size());
  for (auto _ : state) {
    if constexpr (Parallel)
      ad::kernels::parallel::conv2d_forward(g, x.data(), w.data(), b.data(), y.data());
    else
      ad::kernels::serial::conv2d_forward(g, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Conv2dForward<false>)->Arg(16)->Arg(32);
BENCHMARK(BM_Conv2dForward<true>)->Arg(16)->Arg(32);

template <bool Parallel>
void BM_Conv2dBackwardWeight(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto g = ad::kernels::make_conv_geom(16, c, 32, 32, c, 3, 3, 1, 1);
  const auto x = noise(g.input_size(), 1), dy = noise(g.output_size(), 2);
  std::vector<double> dw(g.weight_size()), db(c);
  for (auto _ : state) {
    if constexpr (Parallel)
      ad::kernels::parallel::conv2d_backward_weight(g, x.data(), dy.data(), dw.data(), db.data());
    else
      ad::kernels::serial::conv2d_backward_weight(g, x.data(), dy.data(), dw.data(), db.data());
    benchmark::DoNotOptimize(dw.data());
  }
}
BENCHMARK(BM_Conv2dBackwardWeight<false>)->Arg(16)->Arg(32);
BENCHMARK(BM_Conv2dBackwardWeight<true>)->Arg(16)->Arg(32);

template <bool Parallel>
void BM_Assembly(benchmark::State& state) {
  const auto K = random_k(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto sys = Parallel ? fvm::assemble_system(K, {}) : fvm::serial::assemble_system(K, {});
    benchmark::DoNotOptimize(sys.vals.data());
  }
}
BENCHMARK(BM_Assembly<false>)->Arg(32)->Arg(100);
BENCHMARK(BM_Assembly<true>)->Arg(32)->Arg(100);

template <bool Parallel>
void BM_AdjointGradient(benchmark::State& state) {
  const auto K = random_k(static_cast<std::size_t>(state.range(0)));
  const auto sys = fvm::assemble_system(K, {});
  const auto h = fvm::solve_head(sys);
  auto r = h.with_values(std::vector<double>(h.size(), 0.0));
  for (std::size_t p = 0; p < r.size(); p += 7) r[p] = 1.0;
  const auto lambda = adjoint::solve_adjoint(sys, r);
  for (auto _ : state) {
    auto g = Parallel ? adjoint::conductivity_gradient(lambda, h, K, {})
                      : adjoint::serial::conductivity_gradient(lambda, h, K, {});
    benchmark::DoNotOptimize(g.storage().data());
  }
}
BENCHMARK(BM_AdjointGradient<false>)->Arg(32)->Arg(100);
BENCHMARK(BM_AdjointGradient<true>)->Arg(32)->Arg(100);

template <bool Parallel>
void BM_Kid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<metrics::Embedding> a(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = noise(64, 100 + k);
    b[k] = noise(64, 5000 + k);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? metrics::kid(a, b) : metrics::serial::kid(a, b));
}
BENCHMARK(BM_Kid<false>)->Arg(200);
BENCHMARK(BM_Kid<true>)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
