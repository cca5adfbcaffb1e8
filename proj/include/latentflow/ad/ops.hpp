#pragma once

#include <vector>

#include "latentflow/ad/tape.hpp"

// Differentiable operations recorded on the tape of their inputs.
//
// Elementwise binary ops accept equal shapes, or a single-element operand
// that is broadcast against the other. No other broadcasting is supported.
namespace lf::ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);

/// [m,k] x [k,n] -> [m,n]
Var matmul(Var a, Var b);
/// x[N,in], weight[out,in], bias[out] (bias may be invalid) -> [N,out]
Var dense(Var x, Var weight, Var bias);
/// x[N,Cin,H,W], weight[Cout,Cin,kh,kw], bias[Cout] (optional), zero padding.
Var conv2d(Var x, Var weight, Var bias, std::size_t stride, std::size_t pad);
/// Adjoint of conv2d: x[N,Cin,H,W], weight[Cin,Cout,kh,kw] -> [N,Cout,(H-1)s-2p+kh, ...]
Var conv_transpose2d(Var x, Var weight, Var bias, std::size_t stride, std::size_t pad);

Var relu(Var a);
Var silu(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
Var abs(Var a);
Var square(Var a);

Var reshape(Var a, Shape shape);
/// Concatenates along `axis`; all other extents must agree.
Var concat(const std::vector<Var>& parts, std::size_t axis);
/// Half-open range [begin, end) along `axis`.
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);

Var sum(Var a);
Var mean(Var a);
/// Sum of a * c for a constant tensor c of the same shape.
Var dot(Var a, const Tensor& c);

/// x[N,C,H,W] + v[N,C] broadcast over the spatial extents.
Var add_channelwise(Var x, Var v);

}  // namespace lf::ad
