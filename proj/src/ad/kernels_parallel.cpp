#include <Eigen/Core>
#include <vector>

#include "latentflow/ad/kernels.hpp"

namespace lf::ad::kernels::parallel {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConstMat = Eigen::Map<const RowMat>;

// Column layout: row r = (ci, ky, kx), column c = (oy, ox).
void im2col(const ConvGeom& g, const double* x, double* col, std::size_t col_stride) {
  const long pad = static_cast<long>(g.pad);
  for (std::size_t ci = 0; ci < g.in_channels; ++ci)
    for (std::size_t ky = 0; ky < g.kernel_h; ++ky)
      for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
        double* row = col + ((ci * g.kernel_h + ky) * g.kernel_w + kx) * col_stride;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - pad;
          double* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= static_cast<long>(g.in_h)) {
            for (std::size_t ox = 0; ox < g.out_w; ++ox) dst[ox] = 0.0;
            continue;
          }
          const double* src = x + (ci * g.in_h + iy) * g.in_w;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - pad;
            dst[ox] = (ix < 0 || ix >= static_cast<long>(g.in_w)) ? 0.0 : src[ix];
          }
        }
      }
}

void col2im_add(const ConvGeom& g, const double* col, double* dx) {
  const long pad = static_cast<long>(g.pad);
  const std::size_t npix = g.out_h * g.out_w;
  for (std::size_t ci = 0; ci < g.in_channels; ++ci)
    for (std::size_t ky = 0; ky < g.kernel_h; ++ky)
      for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
        const double* row = col + ((ci * g.kernel_h + ky) * g.kernel_w + kx) * npix;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - pad;
          if (iy < 0 || iy >= static_cast<long>(g.in_h)) continue;
          double* dst = dx + (ci * g.in_h + iy) * g.in_w;
          const double* src = row + oy * g.out_w;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - pad;
            if (ix >= 0 && ix < static_cast<long>(g.in_w)) dst[ix] += src[ox];
          }
        }
      }
}

}  // namespace

void conv2d_forward(const ConvGeom& g, const double* x, const double* w, const double* b, double* y) {
  const long rows = static_cast<long>(g.in_channels * g.kernel_h * g.kernel_w);
  const long npix = static_cast<long>(g.out_h * g.out_w);
  const long co = static_cast<long>(g.out_channels);
  const long batch = static_cast<long>(g.batch);
  MapConstMat weight(w, co, rows);
#pragma omp parallel
  {
    std::vector<double> col(static_cast<std::size_t>(rows * npix));
#pragma omp for schedule(static)
    for (long n = 0; n < batch; ++n) {
      im2col(g, x + n * g.in_channels * g.in_h * g.in_w, col.data(), npix);
      MapMat out(y + n * co * npix, co, npix);
      out.noalias() = weight * MapConstMat(col.data(), rows, npix);
      if (b)
        for (long c = 0; c < co; ++c) out.row(c).array() += b[c];
    }
  }
}

void conv2d_backward_input(const ConvGeom& g, const double* dy, const double* w, double* dx) {
  const long rows = static_cast<long>(g.in_channels * g.kernel_h * g.kernel_w);
  const long npix = static_cast<long>(g.out_h * g.out_w);
  const long co = static_cast<long>(g.out_channels);
  const long batch = static_cast<long>(g.batch);
  MapConstMat weight(w, co, rows);
#pragma omp parallel
  {
    RowMat col(rows, npix);
#pragma omp for schedule(static)
    for (long n = 0; n < batch; ++n) {
      col.noalias() = weight.transpose() * MapConstMat(dy + n * co * npix, co, npix);
      col2im_add(g, col.data(), dx + n * g.in_channels * g.in_h * g.in_w);
    }
  }
}

void conv2d_backward_weight(const ConvGeom& g, const double* x, const double* dy, double* dw, double* db) {
  const long rows = static_cast<long>(g.in_channels * g.kernel_h * g.kernel_w);
  const long npix = static_cast<long>(g.out_h * g.out_w);
  const long co = static_cast<long>(g.out_channels);
  const long batch = static_cast<long>(g.batch);
  const long cols = batch * npix;
  RowMat col(rows, cols);
  RowMat grad(co, cols);
#pragma omp parallel
  {
    std::vector<double> scratch(static_cast<std::size_t>(rows * npix));
#pragma omp for schedule(static)
    for (long n = 0; n < batch; ++n) {
      im2col(g, x + n * g.in_channels * g.in_h * g.in_w, scratch.data(), npix);
      col.block(0, n * npix, rows, npix) = MapConstMat(scratch.data(), rows, npix);
      grad.block(0, n * npix, co, npix) = MapConstMat(dy + n * co * npix, co, npix);
    }
  }
  MapMat(dw, co, rows).noalias() += grad * col.transpose();
  if (db)
    for (long c = 0; c < co; ++c) db[c] += grad.row(c).sum();
}

void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  MapMat(c, static_cast<long>(m), static_cast<long>(n)).noalias() =
      MapConstMat(a, static_cast<long>(m), static_cast<long>(k)) *
      MapConstMat(b, static_cast<long>(k), static_cast<long>(n));
}

}  // namespace lf::ad::kernels::parallel
