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

#include "purlab/autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace purlab::ops {

namespace {

using detail::Node;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

using BackwardFn = std::function<void(Node&)>;

Tensor make(const char* op, Shape shape, std::vector<double> value,
            std::initializer_list<Tensor> inputs, BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  bool track = false;
  if (grad_enabled()) {
    for (const Tensor& t : inputs) track = track || (t.defined() && t.requires_grad());
  }
  if (track) {
    node->requires_grad = true;
    for (const Tensor& t : inputs) {
      // Undefined optional operands are stored as inert placeholders so the
      // backward closures can index inputs positionally.
      node->inputs.push_back(t.defined() ? t.node() : std::make_shared<Node>());
    }
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

// Gradient slot of input i, or nullptr when it does not need one.
std::vector<double>* slot(Node& self, std::size_t i) {
  Node& in = *self.inputs[i];
  return in.requires_grad ? &in.ensure_grad() : nullptr;
}

const std::vector<double>& val(const Node& self, std::size_t i) { return self.inputs[i]->value; }

void require(bool cond, const std::string& what) {
  if (!cond) throw ShapeError(what);
}

std::string pair_str(const char* op, const Tensor& a, const Tensor& b) {
  return std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape());
}

enum class Bcast { kNone, kAScalar, kBScalar };

Bcast check_binary(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Bcast::kNone;
  if (a.numel() == 1) return Bcast::kAScalar;
  if (b.numel() == 1) return Bcast::kBScalar;
  throw ShapeError(pair_str(op, a, b));
}

template <typename F>
Tensor unary(const char* op, const Tensor& x, F&& f, BackwardFn backward) {
  std::vector<double> out(x.numel());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make(op, x.shape(), std::move(out), {x}, std::move(backward));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  const Bcast bc = check_binary("add", a, b);
  const Tensor& big = bc == Bcast::kAScalar ? b : a;
  std::vector<double> out(big.numel());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[bc == Bcast::kAScalar ? 0 : i] + bv[bc == Bcast::kBScalar ? 0 : i];
  }
  return make("add", big.shape(), std::move(out), {a, b}, [bc](Node& self) {
    const auto& g = self.grad;
    for (std::size_t k = 0; k < 2; ++k) {
      auto* d = slot(self, k);
      if (!d) continue;
      const bool reduce = (k == 0 && bc == Bcast::kAScalar) || (k == 1 && bc == Bcast::kBScalar);
      if (reduce) {
        (*d)[0] += std::accumulate(g.begin(), g.end(), 0.0);
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  const Bcast bc = check_binary("sub", a, b);
  const Tensor& big = bc == Bcast::kAScalar ? b : a;
  std::vector<double> out(big.numel());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[bc == Bcast::kAScalar ? 0 : i] - bv[bc == Bcast::kBScalar ? 0 : i];
  }
  return make("sub", big.shape(), std::move(out), {a, b}, [bc](Node& self) {
    const auto& g = self.grad;
    for (std::size_t k = 0; k < 2; ++k) {
      auto* d = slot(self, k);
      if (!d) continue;
      const double sign = k == 0 ? 1.0 : -1.0;
      const bool reduce = (k == 0 && bc == Bcast::kAScalar) || (k == 1 && bc == Bcast::kBScalar);
      if (reduce) {
        (*d)[0] += sign * std::accumulate(g.begin(), g.end(), 0.0);
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += sign * g[i];
      }
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const Bcast bc = check_binary("mul", a, b);
  const Tensor& big = bc == Bcast::kAScalar ? b : a;
  std::vector<double> out(big.numel());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[bc == Bcast::kAScalar ? 0 : i] * bv[bc == Bcast::kBScalar ? 0 : i];
  }
  return make("mul", big.shape(), std::move(out), {a, b}, [bc](Node& self) {
    const auto& g = self.grad;
    const auto& av = val(self, 0);
    const auto& bv = val(self, 1);
    auto at = [&](const std::vector<double>& v, bool scalar, std::size_t i) {
      return v[scalar ? 0 : i];
    };
    const bool as = bc == Bcast::kAScalar;
    const bool bs = bc == Bcast::kBScalar;
    if (auto* d = slot(self, 0)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[as ? 0 : i] += g[i] * at(bv, bs, i);
    }
    if (auto* d = slot(self, 1)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[bs ? 0 : i] += g[i] * at(av, as, i);
    }
  });
}

Tensor add_scalar(const Tensor& x, double s) {
  return unary("add_scalar", x, [s](double v) { return v + s; }, [](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) (*d)[i] += self.grad[i];
  });
}

Tensor scale(const Tensor& x, double s) {
  return unary("scale", x, [s](double v) { return v * s; }, [s](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) (*d)[i] += s * self.grad[i];
  });
}

Tensor neg(const Tensor& x) { return scale(x, -1.0); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0), pair_str("matmul", a, b));
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n);
  MutMap(out.data(), m, n).noalias() = ConstMap(a.data().data(), m, k) * ConstMap(b.data().data(), k, n);
  return make("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    ConstMap g(self.grad.data(), m, n);
    if (auto* d = slot(self, 0)) {
      MutMap(d->data(), m, k).noalias() += g * ConstMap(val(self, 1).data(), k, n).transpose();
    }
    if (auto* d = slot(self, 1)) {
      MutMap(d->data(), k, n).noalias() += ConstMap(val(self, 0).data(), m, k).transpose() * g;
    }
  });
}

namespace {

struct ConvGeom {
  std::size_t ci, h, w, co, k, stride, pad, ho, wo;
  std::size_t rows() const { return ci * k * k; }
  std::size_t cols() const { return ho * wo; }
};

void im2col(const double* x, const ConvGeom& g, double* col) {
  for (std::size_t c = 0; c < g.ci; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        double* row = col + ((c * g.k + ky) * g.k + kx) * g.cols();
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          double* dst = row + oy * g.wo;
          if (iy < 0 || iy >= static_cast<long>(g.h)) {
            std::fill(dst, dst + g.wo, 0.0);
            continue;
          }
          const double* src = x + (c * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            dst[ox] = (ix < 0 || ix >= static_cast<long>(g.w)) ? 0.0 : src[ix];
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvGeom& g, double* dx) {
  for (std::size_t c = 0; c < g.ci; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        const double* row = col + ((c * g.k + ky) * g.k + kx) * g.cols();
        for (std::size_t oy = 0; oy < g.ho; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
          double* dst = dx + (c * g.h + static_cast<std::size_t>(iy)) * g.w;
          const double* src = row + oy * g.wo;
          for (std::size_t ox = 0; ox < g.wo; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            if (ix >= 0 && ix < static_cast<long>(g.w)) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

namespace {

// Valid output column range [lo, hi) for kernel column kx at stride 1.
inline std::pair<std::size_t, std::size_t> valid_cols(const ConvGeom& g, std::size_t kx) {
  const std::size_t lo = g.pad > kx ? g.pad - kx : 0;
  const std::size_t hi = std::min(g.wo, g.w + g.pad - kx);
  return {lo, std::max(lo, hi)};
}

// Stride-1 direct kernels, used for layers with few output channels where
// the im2col scratch matrix costs more than the GEMM saves.
void direct_forward(const double* x, const double* w, const ConvGeom& g, double* out) {
  for (std::size_t co = 0; co < g.co; ++co) {
    double* o = out + co * g.cols();
    for (std::size_t ci = 0; ci < g.ci; ++ci) {
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const double wv = w[((co * g.ci + ci) * g.k + ky) * g.k + kx];
          const auto [lo, hi] = valid_cols(g, kx);
          for (std::size_t oy = 0; oy < g.ho; ++oy) {
            const long iy = static_cast<long>(oy + ky) - static_cast<long>(g.pad);
            if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
            const double* in = x + (ci * g.h + static_cast<std::size_t>(iy)) * g.w + kx - g.pad;
            double* orow = o + oy * g.wo;
            for (std::size_t ox = lo; ox < hi; ++ox) orow[ox] += wv * in[ox];
          }
        }
      }
    }
  }
}

void direct_backward(const double* gout, const double* x, const double* w, const ConvGeom& g,
                     double* dx, double* dw) {
  for (std::size_t co = 0; co < g.co; ++co) {
    const double* go = gout + co * g.cols();
    for (std::size_t ci = 0; ci < g.ci; ++ci) {
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const std::size_t widx = ((co * g.ci + ci) * g.k + ky) * g.k + kx;
          const double wv = w[widx];
          const auto [lo, hi] = valid_cols(g, kx);
          double acc = 0.0;
          for (std::size_t oy = 0; oy < g.ho; ++oy) {
            const long iy = static_cast<long>(oy + ky) - static_cast<long>(g.pad);
            if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
            const std::size_t off = (ci * g.h + static_cast<std::size_t>(iy)) * g.w + kx - g.pad;
            const double* grow = go + oy * g.wo;
            if (dx) {
              double* drow = dx + off;
              for (std::size_t ox = lo; ox < hi; ++ox) drow[ox] += wv * grow[ox];
            }
            if (dw) {
              const double* in = x + off;
              for (std::size_t ox = lo; ox < hi; ++ox) acc += grow[ox] * in[ox];
            }
          }
          if (dw) dw[widx] += acc;
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride,
              std::size_t padding) {
  require(x.rank() == 3, "conv2d: input must be (C,H,W), got " + shape_str(x.shape()));
  require(weight.rank() == 4 && weight.dim(2) == weight.dim(3),
          "conv2d: weight must be (Co,Ci,k,k), got " + shape_str(weight.shape()));
  require(weight.dim(1) == x.dim(0), pair_str("conv2d", x, weight));
  require(stride == 1 || stride == 2, "conv2d: stride must be 1 or 2");
  ConvGeom g{x.dim(0), x.dim(1), x.dim(2), weight.dim(0), weight.dim(2), stride, padding, 0, 0};
  require(g.h + 2 * g.pad >= g.k && g.w + 2 * g.pad >= g.k,
          "conv2d: kernel larger than padded input " + pair_str("conv2d", x, weight));
  g.ho = (g.h + 2 * g.pad - g.k) / g.stride + 1;
  g.wo = (g.w + 2 * g.pad - g.k) / g.stride + 1;
  if (bias.defined()) {
    require(bias.rank() == 1 && bias.dim(0) == g.co, pair_str("conv2d bias", weight, bias));
  }

  std::vector<double> out(g.co * g.cols(), 0.0);
  const bool direct = g.stride == 1 && g.co <= 8;
  std::shared_ptr<std::vector<double>> col;
  if (direct) {
    direct_forward(x.data().data(), weight.data().data(), g, out.data());
  } else {
    col = std::make_shared<std::vector<double>>(g.rows() * g.cols());
    im2col(x.data().data(), g, col->data());
    MutMap(out.data(), g.co, g.cols()).noalias() =
        ConstMap(weight.data().data(), g.co, g.rows()) * ConstMap(col->data(), g.rows(), g.cols());
  }
  if (bias.defined()) {
    auto bv = bias.data();
    for (std::size_t c = 0; c < g.co; ++c) {
      for (std::size_t p = 0; p < g.cols(); ++p) out[c * g.cols() + p] += bv[c];
    }
  }
  return make("conv2d", {g.co, g.ho, g.wo}, std::move(out), {x, weight, bias},
              [g, col, direct](Node& self) {
                ConstMap gm(self.grad.data(), g.co, g.cols());
                if (auto* db = slot(self, 2)) {
                  // Fixed summation order, independent of buffer alignment.
                  const std::size_t n = g.cols();
                  for (std::size_t c = 0; c < g.co; ++c) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < n; ++i) s += self.grad[c * n + i];
                    (*db)[c] += s;
                  }
                }
                auto* dw = slot(self, 1);
                auto* dx = slot(self, 0);
                if (direct) {
                  direct_backward(self.grad.data(), val(self, 0).data(), val(self, 1).data(), g,
                                  dx ? dx->data() : nullptr, dw ? dw->data() : nullptr);
                  return;
                }
                if (dw) {
                  MutMap(dw->data(), g.co, g.rows()).noalias() +=
                      gm * ConstMap(col->data(), g.rows(), g.cols()).transpose();
                }
                if (dx) {
                  RowMat dcol = ConstMap(val(self, 1).data(), g.co, g.rows()).transpose() * gm;
                  col2im_add(dcol.data(), g, dx->data());
                }
              });
}

Tensor upsample_nearest2x(const Tensor& x) {
  require(x.rank() == 3, "upsample_nearest2x: input must be (C,H,W), got " + shape_str(x.shape()));
  const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  std::vector<double> out(c * 4 * h * w);
  auto in = x.data();
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < 2 * h; ++y) {
      for (std::size_t xx = 0; xx < 2 * w; ++xx) {
        out[(ch * 2 * h + y) * 2 * w + xx] = in[(ch * h + y / 2) * w + xx / 2];
      }
    }
  }
  return make("upsample", {c, 2 * h, 2 * w}, std::move(out), {x}, [c, h, w](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t y = 0; y < 2 * h; ++y) {
        for (std::size_t xx = 0; xx < 2 * w; ++xx) {
          (*d)[(ch * h + y / 2) * w + xx / 2] += self.grad[(ch * 2 * h + y) * 2 * w + xx];
        }
      }
    }
  });
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; }, [](Node& self) {
    auto* d = slot(self, 0);
    const auto& in = val(self, 0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] > 0.0) (*d)[i] += self.grad[i];
    }
  });
}

Tensor silu(const Tensor& x) {
  return unary("silu", x, [](double v) { return v / (1.0 + std::exp(-v)); }, [](Node& self) {
    auto* d = slot(self, 0);
    const auto& in = val(self, 0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-in[i]));
      (*d)[i] += self.grad[i] * s * (1.0 + in[i] * (1.0 - s));
    }
  });
}

Tensor tanh(const Tensor& x) {
  Tensor out = unary("tanh", x, [](double v) { return std::tanh(v); }, nullptr);
  if (!out.node()->requires_grad) return out;
  out.node()->backward = [](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t i = 0; i < self.value.size(); ++i) {
      (*d)[i] += self.grad[i] * (1.0 - self.value[i] * self.value[i]);
    }
  };
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = unary("sigmoid", x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); }, nullptr);
  if (!out.node()->requires_grad) return out;
  out.node()->backward = [](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t i = 0; i < self.value.size(); ++i) {
      (*d)[i] += self.grad[i] * self.value[i] * (1.0 - self.value[i]);
    }
  };
  return out;
}

Tensor square(const Tensor& x) {
  return unary("square", x, [](double v) { return v * v; }, [](Node& self) {
    auto* d = slot(self, 0);
    const auto& in = val(self, 0);
    for (std::size_t i = 0; i < in.size(); ++i) (*d)[i] += 2.0 * in[i] * self.grad[i];
  });
}

Tensor sqrt(const Tensor& x) {
  Tensor out = unary("sqrt", x, [](double v) { return std::sqrt(v); }, nullptr);
  if (!out.node()->requires_grad) return out;
  out.node()->backward = [](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t i = 0; i < self.value.size(); ++i) {
      (*d)[i] += self.grad[i] * 0.5 / self.value[i];
    }
  };
  return out;
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  if (lo > hi) {
    throw ShapeError("clamp: min " + std::to_string(lo) + " exceeds max " + std::to_string(hi));
  }
  return unary("clamp", x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
               [lo, hi](Node& self) {
                 auto* d = slot(self, 0);
                 const auto& in = val(self, 0);
                 for (std::size_t i = 0; i < in.size(); ++i) {
                   if (in[i] >= lo && in[i] <= hi) (*d)[i] += self.grad[i];
                 }
               });
}

Tensor sum(const Tensor& x) {
  auto in = x.data();
  const double s = std::accumulate(in.begin(), in.end(), 0.0);
  return make("sum", {}, {s}, {x}, [](Node& self) {
    auto* d = slot(self, 0);
    for (double& v : *d) v += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  auto in = x.data();
  const double n = static_cast<double>(in.size());
  const double s = std::accumulate(in.begin(), in.end(), 0.0) / n;
  return make("mean", {}, {s}, {x}, [n](Node& self) {
    auto* d = slot(self, 0);
    const double g = self.grad[0] / n;
    for (double& v : *d) v += g;
  });
}

Tensor mse(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), pair_str("mse", a, b));
  auto av = a.data();
  auto bv = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double diff = av[i] - bv[i];
    s += diff * diff;
  }
  const double n = static_cast<double>(av.size());
  return make("mse", {}, {s / n}, {a, b}, [n](Node& self) {
    const auto& av = val(self, 0);
    const auto& bv = val(self, 1);
    const double g = 2.0 * self.grad[0] / n;
    auto* da = slot(self, 0);
    auto* db = slot(self, 1);
    for (std::size_t i = 0; i < av.size(); ++i) {
      const double diff = g * (av[i] - bv[i]);
      if (da) (*da)[i] += diff;
      if (db) (*db)[i] -= diff;
    }
  });
}

Tensor normalize_channels(const Tensor& x, double eps) {
  require(x.rank() == 3, "normalize_channels: input must be (C,H,W), got " + shape_str(x.shape()));
  const std::size_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
  auto in = x.data();
  auto norms = std::make_shared<std::vector<double>>(hw, eps);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < hw; ++p) (*norms)[p] += in[ch * hw + p] * in[ch * hw + p];
  }
  for (double& n : *norms) n = std::sqrt(n);
  std::vector<double> out(in.size());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < hw; ++p) out[ch * hw + p] = in[ch * hw + p] / (*norms)[p];
  }
  Tensor result = make("normalize_channels", x.shape(), std::move(out), {x}, nullptr);
  if (!result.node()->requires_grad) return result;
  result.node()->backward = [c, hw, norms](Node& self) {
    auto* d = slot(self, 0);
    const auto& y = self.value;
    const auto& g = self.grad;
    for (std::size_t p = 0; p < hw; ++p) {
      double dot = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) dot += g[ch * hw + p] * y[ch * hw + p];
      const double inv = 1.0 / (*norms)[p];
      for (std::size_t ch = 0; ch < c; ++ch) {
        (*d)[ch * hw + p] += (g[ch * hw + p] - y[ch * hw + p] * dot) * inv;
      }
    }
  };
  return result;
}

Tensor concat_channels(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_channels: no inputs");
  for (const Tensor& t : parts) {
    require(t.rank() == 3 && t.dim(1) == parts[0].dim(1) && t.dim(2) == parts[0].dim(2),
            pair_str("concat_channels", parts[0], t));
  }
  std::size_t channels = 0;
  std::vector<double> out;
  for (const Tensor& t : parts) {
    channels += t.dim(0);
    out.insert(out.end(), t.data().begin(), t.data().end());
  }
  Shape shape{channels, parts[0].dim(1), parts[0].dim(2)};

  // Built by hand: make() takes a fixed initializer list.
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(out);
  node->op = "concat_channels";
  bool track = false;
  if (grad_enabled()) {
    for (const Tensor& t : parts) track = track || t.requires_grad();
  }
  if (track) {
    node->requires_grad = true;
    for (const Tensor& t : parts) node->inputs.push_back(t.node());
    node->backward = [](Node& self) {
      std::size_t offset = 0;
      for (std::size_t i = 0; i < self.inputs.size(); ++i) {
        const std::size_t n = self.inputs[i]->value.size();
        if (auto* d = slot(self, i)) {
          for (std::size_t j = 0; j < n; ++j) (*d)[j] += self.grad[offset + j];
        }
        offset += n;
      }
    };
  }
  return Tensor(std::move(node));
}

Tensor add_channel_bias(const Tensor& x, const Tensor& v) {
  require(x.rank() == 3 && v.numel() == x.dim(0), pair_str("add_channel_bias", x, v));
  const std::size_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
  std::vector<double> out(x.data().begin(), x.data().end());
  auto bv = v.data();
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < hw; ++p) out[ch * hw + p] += bv[ch];
  }
  return make("add_channel_bias", x.shape(), std::move(out), {x, v}, [c, hw](Node& self) {
    if (auto* dx = slot(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*dx)[i] += self.grad[i];
    }
    if (auto* dv = slot(self, 1)) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        double s = 0.0;
        for (std::size_t p = 0; p < hw; ++p) s += self.grad[ch * hw + p];
        (*dv)[ch] += s;
      }
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  require(numel(shape) == x.numel(),
          "reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  std::vector<double> out(x.data().begin(), x.data().end());
  return make("reshape", std::move(shape), std::move(out), {x}, [](Node& self) {
    auto* d = slot(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) (*d)[i] += self.grad[i];
  });
}

Tensor log_softmax(const Tensor& logits) {
  auto in = logits.data();
  const double mx = *std::max_element(in.begin(), in.end());
  double z = 0.0;
  for (double v : in) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] - lse;
  Tensor result = make("log_softmax", logits.shape(), std::move(out), {logits}, nullptr);
  if (!result.node()->requires_grad) return result;
  result.node()->backward = [](Node& self) {
    auto* d = slot(self, 0);
    const double gs = std::accumulate(self.grad.begin(), self.grad.end(), 0.0);
    for (std::size_t i = 0; i < self.value.size(); ++i) {
      (*d)[i] += self.grad[i] - std::exp(self.value[i]) * gs;
    }
  };
  return result;
}

Tensor cross_entropy(const Tensor& logits, std::size_t label) {
  require(label < logits.numel(), "cross_entropy: label " + std::to_string(label) +
                                      " out of range for " + shape_str(logits.shape()));
  Tensor lsm = log_softmax(logits);
  std::vector<double> pick(lsm.numel(), 0.0);
  pick[label] = -1.0;
  return sum(mul(lsm, Tensor::from(lsm.shape(), std::move(pick))));
}

}  // namespace purlab::ops
