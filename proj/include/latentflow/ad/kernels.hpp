#pragma once

#include <cstddef>

namespace lf::ad::kernels {

/// Geometry of a 2-D convolution over NCHW batches with OIHW weights.
struct ConvGeom {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t in_h = 1, in_w = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 1, kernel_w = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
  std::size_t out_h = 1, out_w = 1;

  std::size_t input_size() const { return batch * in_channels * in_h * in_w; }
  std::size_t output_size() const { return batch * out_channels * out_h * out_w; }
  std::size_t weight_size() const { return out_channels * in_channels * kernel_h * kernel_w; }
};

/// Fills out_h/out_w from the other fields; throws when the kernel does not fit.
ConvGeom make_conv_geom(std::size_t batch, std::size_t in_channels, std::size_t in_h, std::size_t in_w,
                        std::size_t out_channels, std::size_t kernel_h, std::size_t kernel_w,
                        std::size_t stride, std::size_t pad);

// Each kernel family has the same contract:
//   forward:         y = conv(x, w) + b           (bias may be null)
//   backward_input:  dx += conv^T(dy, w)
//   backward_weight: dw += sum_n dy (*) x,  db += sum dy  (db may be null)
// Accumulating variants add into the destination instead of overwriting it.

namespace serial {
void conv2d_forward(const ConvGeom& g, const double* x, const double* w, const double* b, double* y);
void conv2d_backward_input(const ConvGeom& g, const double* dy, const double* w, double* dx);
void conv2d_backward_weight(const ConvGeom& g, const double* x, const double* dy, double* dw, double* db);
void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
}  // namespace serial

namespace parallel {
void conv2d_forward(const ConvGeom& g, const double* x, const double* w, const double* b, double* y);
void conv2d_backward_input(const ConvGeom& g, const double* dy, const double* w, double* dx);
void conv2d_backward_weight(const ConvGeom& g, const double* x, const double* dy, double* dw, double* db);
/// c[m,n] = a[m,k] * b[k,n], row-major.
void matmul(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
}  // namespace parallel

}  // namespace lf::ad::kernels
