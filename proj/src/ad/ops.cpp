#include "latentflow/ad/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "latentflow/ad/kernels.hpp"

namespace lf::ad {
namespace {

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  throw std::invalid_argument(std::string(op) + ": " + detail);
}

Tape& common_tape(const char* op, Var a, Var b) {
  if (!a.valid() || !b.valid()) shape_error(op, "unbound operand");
  if (&a.tape() != &b.tape()) shape_error(op, "operands live on different tapes");
  return a.tape();
}

enum class Broadcast { none, left_scalar, right_scalar };

Broadcast check_binary(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::none;
  if (b.size() == 1) return Broadcast::right_scalar;
  if (a.size() == 1) return Broadcast::left_scalar;
  shape_error(op, "shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

// Reduces a full-size gradient into a (possibly broadcast) operand's gradient.
void accumulate(Tensor& dst, const Tensor& src, double factor, bool reduce) {
  if (reduce) {
    double s = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) s += src[i];
    dst[0] += factor * s;
  } else {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += factor * src[i];
  }
}

template <typename F, typename DF>
Var unary(const char* op, Var a, F f, DF df) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return a.tape().record(std::move(y), {a.id()},
                         [df](Tape& t, int id) {
                           const int in = t.inputs(id)[0];
                           if (!t.requires_grad(in)) return;
                           const Tensor& x = t.value(in);
                           const Tensor& y = t.value(id);
                           const Tensor& g = t.grad_buffer(id);
                           Tensor& dx = t.grad_buffer(in);
                           for (std::size_t i = 0; i < x.size(); ++i) dx[i] += g[i] * df(x[i], y[i]);
                         },
                         op);
}

}  // namespace

Var add(Var a, Var b) {
  Tape& tape = common_tape("add", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Broadcast bc = check_binary("add", x, y);
  Tensor out(bc == Broadcast::left_scalar ? y.shape() : x.shape());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = x[bc == Broadcast::left_scalar ? 0 : i] + y[bc == Broadcast::right_scalar ? 0 : i];
  return tape.record(std::move(out), {a.id(), b.id()},
                     [bc](Tape& t, int id) {
                       const auto& in = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       if (t.requires_grad(in[0])) accumulate(t.grad_buffer(in[0]), g, 1.0, bc == Broadcast::left_scalar);
                       if (t.requires_grad(in[1])) accumulate(t.grad_buffer(in[1]), g, 1.0, bc == Broadcast::right_scalar);
                     },
                     "add");
}

Var sub(Var a, Var b) {
  Tape& tape = common_tape("sub", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Broadcast bc = check_binary("sub", x, y);
  Tensor out(bc == Broadcast::left_scalar ? y.shape() : x.shape());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = x[bc == Broadcast::left_scalar ? 0 : i] - y[bc == Broadcast::right_scalar ? 0 : i];
  return tape.record(std::move(out), {a.id(), b.id()},
                     [bc](Tape& t, int id) {
                       const auto& in = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       if (t.requires_grad(in[0])) accumulate(t.grad_buffer(in[0]), g, 1.0, bc == Broadcast::left_scalar);
                       if (t.requires_grad(in[1])) accumulate(t.grad_buffer(in[1]), g, -1.0, bc == Broadcast::right_scalar);
                     },
                     "sub");
}

Var mul(Var a, Var b) {
  Tape& tape = common_tape("mul", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Broadcast bc = check_binary("mul", x, y);
  Tensor out(bc == Broadcast::left_scalar ? y.shape() : x.shape());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = x[bc == Broadcast::left_scalar ? 0 : i] * y[bc == Broadcast::right_scalar ? 0 : i];
  return tape.record(std::move(out), {a.id(), b.id()},
                     [bc](Tape& t, int id) {
                       const auto& in = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       const Tensor& x = t.value(in[0]);
                       const Tensor& y = t.value(in[1]);
                       const bool ls = bc == Broadcast::left_scalar;
                       const bool rs = bc == Broadcast::right_scalar;
                       if (t.requires_grad(in[0])) {
                         Tensor& dx = t.grad_buffer(in[0]);
                         for (std::size_t i = 0; i < g.size(); ++i) dx[ls ? 0 : i] += g[i] * y[rs ? 0 : i];
                       }
                       if (t.requires_grad(in[1])) {
                         Tensor& dy = t.grad_buffer(in[1]);
                         for (std::size_t i = 0; i < g.size(); ++i) dy[rs ? 0 : i] += g[i] * x[ls ? 0 : i];
                       }
                     },
                     "mul");
}

Var scale(Var a, double factor) {
  return unary("scale", a, [factor](double v) { return factor * v; }, [factor](double, double) { return factor; });
}

Var add_scalar(Var a, double offset) {
  return unary("add_scalar", a, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Var matmul(Var a, Var b) {
  Tape& tape = common_tape("matmul", a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rank() != 2 || y.rank() != 2 || x.dim(1) != y.dim(0))
    shape_error("matmul", "shape mismatch " + shape_str(x.shape()) + " x " + shape_str(y.shape()));
  const std::size_t m = x.dim(0), k = x.dim(1), n = y.dim(1);
  Tensor out({m, n});
  kernels::parallel::matmul(m, k, n, x.data(), y.data(), out.data());
  return tape.record(std::move(out), {a.id(), b.id()},
                     [m, k, n](Tape& t, int id) {
                       const auto& in = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       const Tensor& x = t.value(in[0]);
                       const Tensor& y = t.value(in[1]);
                       if (t.requires_grad(in[0])) {
                         Tensor& dx = t.grad_buffer(in[0]);
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             double acc = 0.0;
                             for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * y[p * n + j];
                             dx[i * k + p] += acc;
                           }
                       }
                       if (t.requires_grad(in[1])) {
                         Tensor& dy = t.grad_buffer(in[1]);
                         for (std::size_t p = 0; p < k; ++p)
                           for (std::size_t j = 0; j < n; ++j) {
                             double acc = 0.0;
                             for (std::size_t i = 0; i < m; ++i) acc += x[i * k + p] * g[i * n + j];
                             dy[p * n + j] += acc;
                           }
                       }
                     },
                     "matmul");
}

Var dense(Var x, Var weight, Var bias) {
  Tape& tape = common_tape("dense", x, weight);
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  if (xv.rank() != 2 || wv.rank() != 2 || xv.dim(1) != wv.dim(1))
    shape_error("dense", "input " + shape_str(xv.shape()) + " incompatible with weight " + shape_str(wv.shape()));
  const std::size_t batch = xv.dim(0), in = xv.dim(1), out_dim = wv.dim(0);
  if (bias.valid() && (bias.value().rank() != 1 || bias.value().dim(0) != out_dim))
    shape_error("dense", "bias " + shape_str(bias.value().shape()) + " for " + std::to_string(out_dim) + " outputs");
  Tensor out({batch, out_dim});
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t o = 0; o < out_dim; ++o) {
      double acc = bias.valid() ? bias.value()[o] : 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += wv[o * in + i] * xv[n * in + i];
      out[n * out_dim + o] = acc;
    }
  std::vector<int> inputs{x.id(), weight.id()};
  if (bias.valid()) inputs.push_back(bias.id());
  return tape.record(std::move(out), std::move(inputs),
                     [batch, in, out_dim](Tape& t, int id) {
                       const auto& ins = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       const Tensor& xv = t.value(ins[0]);
                       const Tensor& wv = t.value(ins[1]);
                       if (t.requires_grad(ins[0])) {
                         Tensor& dx = t.grad_buffer(ins[0]);
                         for (std::size_t n = 0; n < batch; ++n)
                           for (std::size_t o = 0; o < out_dim; ++o) {
                             const double go = g[n * out_dim + o];
                             for (std::size_t i = 0; i < in; ++i) dx[n * in + i] += go * wv[o * in + i];
                           }
                       }
                       if (t.requires_grad(ins[1])) {
                         Tensor& dw = t.grad_buffer(ins[1]);
                         for (std::size_t n = 0; n < batch; ++n)
                           for (std::size_t o = 0; o < out_dim; ++o) {
                             const double go = g[n * out_dim + o];
                             for (std::size_t i = 0; i < in; ++i) dw[o * in + i] += go * xv[n * in + i];
                           }
                       }
                       if (ins.size() > 2 && t.requires_grad(ins[2])) {
                         Tensor& db = t.grad_buffer(ins[2]);
                         for (std::size_t n = 0; n < batch; ++n)
                           for (std::size_t o = 0; o < out_dim; ++o) db[o] += g[n * out_dim + o];
                       }
                     },
                     "dense");
}

Var conv2d(Var x, Var weight, Var bias, std::size_t stride, std::size_t pad) {
  Tape& tape = common_tape("conv2d", x, weight);
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  if (xv.rank() != 4 || wv.rank() != 4 || xv.dim(1) != wv.dim(1))
    shape_error("conv2d", "input " + shape_str(xv.shape()) + " incompatible with weight " + shape_str(wv.shape()));
  if (bias.valid() && (bias.value().rank() != 1 || bias.value().dim(0) != wv.dim(0)))
    shape_error("conv2d", "bias " + shape_str(bias.value().shape()) + " for weight " + shape_str(wv.shape()));
  kernels::ConvGeom g;
  try {
    g = kernels::make_conv_geom(xv.dim(0), xv.dim(1), xv.dim(2), xv.dim(3), wv.dim(0), wv.dim(2), wv.dim(3), stride,
                                pad);
  } catch (const std::invalid_argument& e) {
    shape_error("conv2d", std::string(e.what()) + " (input " + shape_str(xv.shape()) + ")");
  }
  Tensor out({g.batch, g.out_channels, g.out_h, g.out_w});
  kernels::parallel::conv2d_forward(g, xv.data(), wv.data(), bias.valid() ? bias.value().data() : nullptr,
                                    out.data());
  std::vector<int> inputs{x.id(), weight.id()};
  if (bias.valid()) inputs.push_back(bias.id());
  return tape.record(std::move(out), std::move(inputs),
                     [g](Tape& t, int id) {
                       const auto& ins = t.inputs(id);
                       const Tensor& gy = t.grad_buffer(id);
                       if (t.requires_grad(ins[0]))
                         kernels::parallel::conv2d_backward_input(g, gy.data(), t.value(ins[1]).data(),
                                                                  t.grad_buffer(ins[0]).data());
                       const bool need_w = t.requires_grad(ins[1]);
                       const bool need_b = ins.size() > 2 && t.requires_grad(ins[2]);
                       if (need_w || need_b) {
                         std::vector<double> scratch;
                         double* dw = nullptr;
                         if (need_w) {
                           dw = t.grad_buffer(ins[1]).data();
                         } else {
                           scratch.assign(g.weight_size(), 0.0);
                           dw = scratch.data();
                         }
                         kernels::parallel::conv2d_backward_weight(g, t.value(ins[0]).data(), gy.data(), dw,
                                                                   need_b ? t.grad_buffer(ins[2]).data() : nullptr);
                       }
                     },
                     "conv2d");
}

Var conv_transpose2d(Var x, Var weight, Var bias, std::size_t stride, std::size_t pad) {
  Tape& tape = common_tape("conv_transpose2d", x, weight);
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  if (xv.rank() != 4 || wv.rank() != 4 || xv.dim(1) != wv.dim(0))
    shape_error("conv_transpose2d",
                "input " + shape_str(xv.shape()) + " incompatible with weight " + shape_str(wv.shape()));
  const std::size_t kh = wv.dim(2), kw = wv.dim(3);
  const std::size_t oh_full = (xv.dim(2) - 1) * stride + kh;
  const std::size_t ow_full = (xv.dim(3) - 1) * stride + kw;
  if (stride == 0 || oh_full <= 2 * pad || ow_full <= 2 * pad)
    shape_error("conv_transpose2d", "padding " + std::to_string(pad) + " too large for input " + shape_str(xv.shape()));
  const std::size_t out_channels = wv.dim(1);
  if (bias.valid() && (bias.value().rank() != 1 || bias.value().dim(0) != out_channels))
    shape_error("conv_transpose2d", "bias " + shape_str(bias.value().shape()) + " for weight " + shape_str(wv.shape()));
  // The equivalent forward convolution maps the output back onto x.
  const kernels::ConvGeom g = kernels::make_conv_geom(xv.dim(0), out_channels, oh_full - 2 * pad, ow_full - 2 * pad,
                                                      xv.dim(1), kh, kw, stride, pad);
  if (g.out_h != xv.dim(2) || g.out_w != xv.dim(3))
    shape_error("conv_transpose2d", "inconsistent geometry for input " + shape_str(xv.shape()));
  Tensor out({g.batch, out_channels, g.in_h, g.in_w}, 0.0);
  kernels::parallel::conv2d_backward_input(g, xv.data(), wv.data(), out.data());
  if (bias.valid()) {
    const std::size_t plane = g.in_h * g.in_w;
    for (std::size_t n = 0; n < g.batch; ++n)
      for (std::size_t c = 0; c < out_channels; ++c)
        for (std::size_t p = 0; p < plane; ++p) out[(n * out_channels + c) * plane + p] += bias.value()[c];
  }
  std::vector<int> inputs{x.id(), weight.id()};
  if (bias.valid()) inputs.push_back(bias.id());
  return tape.record(std::move(out), std::move(inputs),
                     [g, out_channels](Tape& t, int id) {
                       const auto& ins = t.inputs(id);
                       const Tensor& gy = t.grad_buffer(id);
                       if (t.requires_grad(ins[0])) {
                         Tensor& dx = t.grad_buffer(ins[0]);
                         std::vector<double> tmp(dx.size());
                         kernels::parallel::conv2d_forward(g, gy.data(), t.value(ins[1]).data(), nullptr, tmp.data());
                         for (std::size_t i = 0; i < tmp.size(); ++i) dx[i] += tmp[i];
                       }
                       if (t.requires_grad(ins[1]))
                         kernels::parallel::conv2d_backward_weight(g, gy.data(), t.value(ins[0]).data(),
                                                                   t.grad_buffer(ins[1]).data(), nullptr);
                       if (ins.size() > 2 && t.requires_grad(ins[2])) {
                         Tensor& db = t.grad_buffer(ins[2]);
                         const std::size_t plane = g.in_h * g.in_w;
                         for (std::size_t n = 0; n < g.batch; ++n)
                           for (std::size_t c = 0; c < out_channels; ++c) {
                             double acc = 0.0;
                             for (std::size_t p = 0; p < plane; ++p) acc += gy[(n * out_channels + c) * plane + p];
                             db[c] += acc;
                           }
                       }
                     },
                     "conv_transpose2d");
}

Var relu(Var a) {
  return unary("relu", a, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var silu(Var a) {
  return unary("silu", a, [](double v) { return v / (1.0 + std::exp(-v)); },
               [](double v, double) {
                 const double s = 1.0 / (1.0 + std::exp(-v));
                 return s * (1.0 + v * (1.0 - s));
               });
}

Var tanh(Var a) {
  return unary("tanh", a, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
  return unary("exp", a, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var log(Var a) {
  for (double v : a.value().values())
    if (!(v > 0.0)) shape_error("log", "non-positive input " + std::to_string(v));
  return unary("log", a, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var abs(Var a) {
  return unary("abs", a, [](double v) { return std::abs(v); },
               [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Var square(Var a) {
  return unary("square", a, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Var reshape(Var a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  return a.tape().record(std::move(out), {a.id()},
                         [](Tape& t, int id) {
                           const int in = t.inputs(id)[0];
                           if (!t.requires_grad(in)) return;
                           accumulate(t.grad_buffer(in), t.grad_buffer(id), 1.0, false);
                         },
                         "reshape");
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) shape_error("concat", "no operands");
  Tape& tape = parts.front().tape();
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) shape_error("concat", "axis " + std::to_string(axis) + " out of range for " + shape_str(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> extents;
  std::vector<int> inputs;
  for (const Var& p : parts) {
    if (&p.tape() != &tape) shape_error("concat", "operands live on different tapes");
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == axis || s[d] == first[d];
    if (!ok) shape_error("concat", "shape mismatch " + shape_str(first) + " vs " + shape_str(s));
    out_shape[axis] += s[axis];
    extents.push_back(s[axis]);
    inputs.push_back(p.id());
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];
  const std::size_t total = out_shape[axis];
  Tensor out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& src = parts[k].value();
    const std::size_t block = extents[k] * inner;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(src.data() + o * block, block, out.data() + (o * total + offset) * inner);
    offset += extents[k];
  }
  return tape.record(std::move(out), std::move(inputs),
                     [extents, outer, inner, total](Tape& t, int id) {
                       const auto& ins = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < ins.size(); ++k) {
                         const std::size_t block = extents[k] * inner;
                         if (t.requires_grad(ins[k])) {
                           Tensor& dst = t.grad_buffer(ins[k]);
                           for (std::size_t o = 0; o < outer; ++o)
                             for (std::size_t i = 0; i < block; ++i)
                               dst[o * block + i] += g[(o * total + offset) * inner + i];
                         }
                         offset += extents[k];
                       }
                     },
                     "concat");
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& s = a.shape();
  if (axis >= s.size() || begin >= end || end > s[axis])
    shape_error("slice", "range [" + std::to_string(begin) + "," + std::to_string(end) + ") on axis " +
                             std::to_string(axis) + " of " + shape_str(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
  for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
  Shape out_shape = s;
  out_shape[axis] = end - begin;
  const std::size_t full = s[axis];
  const std::size_t block = (end - begin) * inner;
  Tensor out(out_shape);
  const Tensor& src = a.value();
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(src.data() + (o * full + begin) * inner, block, out.data() + o * block);
  return a.tape().record(std::move(out), {a.id()},
                         [outer, inner, full, begin, block](Tape& t, int id) {
                           const int in = t.inputs(id)[0];
                           if (!t.requires_grad(in)) return;
                           const Tensor& g = t.grad_buffer(id);
                           Tensor& dst = t.grad_buffer(in);
                           for (std::size_t o = 0; o < outer; ++o)
                             for (std::size_t i = 0; i < block; ++i) dst[(o * full + begin) * inner + i] += g[o * block + i];
                         },
                         "slice");
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.tape().record(Tensor::scalar(s), {a.id()},
                         [](Tape& t, int id) {
                           const int in = t.inputs(id)[0];
                           if (!t.requires_grad(in)) return;
                           const double g = t.grad_buffer(id)[0];
                           for (double& d : t.grad_buffer(in).values()) d += g;
                         },
                         "sum");
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Var dot(Var a, const Tensor& c) {
  if (a.shape() != c.shape()) shape_error("dot", "shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(c.shape()));
  double s = 0.0;
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * c[i];
  return a.tape().record(Tensor::scalar(s), {a.id()},
                         [c](Tape& t, int id) {
                           const int in = t.inputs(id)[0];
                           if (!t.requires_grad(in)) return;
                           const double g = t.grad_buffer(id)[0];
                           Tensor& d = t.grad_buffer(in);
                           for (std::size_t i = 0; i < c.size(); ++i) d[i] += g * c[i];
                         },
                         "dot");
}

Var add_channelwise(Var x, Var v) {
  Tape& tape = common_tape("add_channelwise", x, v);
  const Tensor& xv = x.value();
  const Tensor& vv = v.value();
  if (xv.rank() != 4 || vv.rank() != 2 || vv.dim(0) != xv.dim(0) || vv.dim(1) != xv.dim(1))
    shape_error("add_channelwise", "shape mismatch " + shape_str(xv.shape()) + " vs " + shape_str(vv.shape()));
  const std::size_t nc = xv.dim(0) * xv.dim(1);
  const std::size_t plane = xv.dim(2) * xv.dim(3);
  Tensor out = xv;
  for (std::size_t k = 0; k < nc; ++k)
    for (std::size_t p = 0; p < plane; ++p) out[k * plane + p] += vv[k];
  return tape.record(std::move(out), {x.id(), v.id()},
                     [nc, plane](Tape& t, int id) {
                       const auto& ins = t.inputs(id);
                       const Tensor& g = t.grad_buffer(id);
                       if (t.requires_grad(ins[0])) accumulate(t.grad_buffer(ins[0]), g, 1.0, false);
                       if (t.requires_grad(ins[1])) {
                         Tensor& dv = t.grad_buffer(ins[1]);
                         for (std::size_t k = 0; k < nc; ++k) {
                           double acc = 0.0;
                           for (std::size_t p = 0; p < plane; ++p) acc += g[k * plane + p];
                           dv[k] += acc;
                         }
                       }
                     },
                     "add_channelwise");
}

}  // namespace lf::ad
