#include <stdexcept>
#include <string>

#include "latentflow/ad/kernels.hpp"

namespace lf::ad::kernels {

ConvGeom make_conv_geom(std::size_t batch, std::size_t in_channels, std::size_t in_h, std::size_t in_w,
                        std::size_t out_channels, std::size_t kernel_h, std::size_t kernel_w,
                        std::size_t stride, std::size_t pad) {
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be positive");
  if (in_h + 2 * pad < kernel_h || in_w + 2 * pad < kernel_w)
    throw std::invalid_argument("conv2d: kernel " + std::to_string(kernel_h) + "x" + std::to_string(kernel_w) +
                                " larger than padded input " + std::to_string(in_h + 2 * pad) + "x" +
                                std::to_string(in_w + 2 * pad));
  ConvGeom g;
  g.batch = batch;
  g.in_channels = in_channels;
  g.in_h = in_h;
  g.in_w = in_w;
  g.out_channels = out_channels;
  g.kernel_h = kernel_h;
  g.kernel_w = kernel_w;
  g.stride = stride;
  g.pad = pad;
  g.out_h = (in_h + 2 * pad - kernel_h) / stride + 1;
  g.out_w = (in_w + 2 * pad - kernel_w) / stride + 1;
  return g;
}

namespace serial {

// Direct loops. Kept as the reference the parallel kernels are tested against.

void conv2d_forward(const ConvGeom& g, const double* x, const double* w, const double* b, double* y) {
  const long pad = static_cast<long>(g.pad);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t co = 0; co < g.out_channels; ++co)
      for (std::size_t oy = 0; oy < g.out_h; ++oy)
        for (std::size_t ox = 0; ox < g.out_w; ++ox) {
          double acc = b ? b[co] : 0.0;
          for (std::size_t ci = 0; ci < g.in_channels; ++ci)
            for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
              const long iy = static_cast<long>(oy * g.stride + ky) - pad;
              if (iy < 0 || iy >= static_cast<long>(g.in_h)) continue;
              for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
                const long ix = static_cast<long>(ox * g.stride + kx) - pad;
                if (ix < 0 || ix >= static_cast<long>(g.in_w)) continue;
                acc += w[((co * g.in_channels + ci) * g.kernel_h + ky) * g.kernel_w + kx] *
                       x[((n * g.in_channels + ci) * g.in_h + iy) * g.in_w + ix];
              }
            }
          y[((n * g.out_channels + co) * g.out_h + oy) * g.out_w + ox] = acc;
        }
}

void conv2d_backward_input(const ConvGeom& g, const double* dy, const double* w, double* dx) {
  const long pad = static_cast<long>(g.pad);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t co = 0; co < g.out_channels; ++co)
      for (std::size_t oy = 0; oy < g.out_h; ++oy)
        for (std::size_t ox = 0; ox < g.out_w; ++ox) {
          const double go = dy[((n * g.out_channels + co) * g.out_h + oy) * g.out_w + ox];
          for (std::size_t ci = 0; ci < g.in_channels; ++ci)
            for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
              const long iy = static_cast<long>(oy * g.stride + ky) - pad;
              if (iy < 0 || iy >= static_cast<long>(g.in_h)) continue;
              for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
                const long ix = static_cast<long>(ox * g.stride + kx) - pad;
                if (ix < 0 || ix >= static_cast<long>(g.in_w)) continue;
                dx[((n * g.in_channels + ci) * g.in_h + iy) * g.in_w + ix] +=
                    go * w[((co * g.in_channels + ci) * g.kernel_h + ky) * g.kernel_w + kx];
              }
            }
        }
}

void conv2d_backward_weight(const ConvGeom& g, const double* x, const double* dy, double* dw, double* db) {
  const long pad = static_cast<long>(g.pad);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t co = 0; co < g.out_channels; ++co)
      for (std::size_t oy = 0; oy < g.out_h; ++oy)
        for (std::size_t ox = 0; ox < g.out_w; ++ox) {
          const double go = dy[((n * g.out_channels + co) * g.out_h + oy) * g.out_w + ox];
          if (db) db[co] += go;
          for (std::size_t ci = 0; ci < g.in_channels; ++ci)
            for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
              const long iy = static_cast<long>(oy * g.stride + ky) - pad;
              if (iy < 0 || iy >= static_cast<long>(g.in_h)) continue;
              for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
                const long ix = static_cast<long>(ox * g.stride + kx) - pad;
                if (ix < 0 || ix >= static_cast<long>(g.in_w)) continue;
                dw[((co * g.in_channels + ci) * g.kernel_h + ky) * g.kernel_w + kx] +=
                    go * x[((n * g.in_channels + ci) * g.in_h + iy) * g.in_w + ix];
              }
            }
        }
}

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = acc;
    }
}

}  // namespace serial
}  // namespace lf::ad::kernels
