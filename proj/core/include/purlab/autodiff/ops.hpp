// Copyright 2026 The purlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "purlab/autodiff/tensor.hpp"

// Differentiable primitives. Image-like tensors are laid out (C, H, W);
// there is no batch axis, batches are built by accumulating gradients over
// per-sample graphs. Binary elementwise ops accept equal shapes or a
// one-element operand (scalar broadcast); nothing else broadcasts.
namespace purlab::ops {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& x, double s);
Tensor scale(const Tensor& x, double s);
Tensor neg(const Tensor& x);

Tensor matmul(const Tensor& a, const Tensor& b);

/// x: (Ci,H,W), weight: (Co,Ci,k,k), bias: (Co) or undefined.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              std::size_t stride, std::size_t padding);
Tensor upsample_nearest2x(const Tensor& x);

Tensor relu(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor square(const Tensor& x);
Tensor sqrt(const Tensor& x);
/// Zero adjoint outside [lo, hi].
Tensor clamp(const Tensor& x, double lo, double hi);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mse(const Tensor& a, const Tensor& b);

/// Divides each spatial position's channel vector by its L2 norm:
/// y = x / sqrt(sum_c x^2 + eps).
Tensor normalize_channels(const Tensor& x, double eps = 1e-10);
Tensor concat_channels(const std::vector<Tensor>& parts);
/// Adds v (C) to every spatial position of x (C,H,W).
Tensor add_channel_bias(const Tensor& x, const Tensor& v);
Tensor reshape(const Tensor& x, Shape shape);
Tensor log_softmax(const Tensor& logits);
/// -log softmax(logits)[label].
Tensor cross_entropy(const Tensor& logits, std::size_t label);

}  // namespace purlab::ops

namespace purlab {

inline Tensor operator+(const Tensor& a, const Tensor& b) { return ops::add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return ops::sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return ops::mul(a, b); }
inline Tensor operator*(double s, const Tensor& x) { return ops::scale(x, s); }
inline Tensor operator*(const Tensor& x, double s) { return ops::scale(x, s); }
inline Tensor operator+(const Tensor& x, double s) { return ops::add_scalar(x, s); }
inline Tensor operator-(const Tensor& x, double s) { return ops::add_scalar(x, -s); }
inline Tensor operator-(const Tensor& x) { return ops::neg(x); }

}  // namespace purlab
