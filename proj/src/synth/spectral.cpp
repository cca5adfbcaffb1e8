#include "latentflow/synth/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace lf::synth {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void fft2d(std::vector<Complex>& data, std::size_t nx, std::size_t ny, FftDirection dir) {
  if (data.size() != nx * ny) throw std::invalid_argument("fft2d: data size does not match grid");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf,
                            dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fft2d: FFTW planning failed");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace lf::synth
