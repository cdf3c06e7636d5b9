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

#include "purlab/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "purlab/autodiff/ops.hpp"

namespace purlab {

namespace {

void require_same(const Image& a, const Image& b, const char* what) {
  if (a.channels() != b.channels() || a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError(std::string(what) + ": images differ in shape " +
                     shape_str({a.channels(), a.height(), a.width()}) + " vs " +
                     shape_str({b.channels(), b.height(), b.width()}));
  }
}

inline double unit(double v) { return (v + 1.0) * 0.5; }

std::vector<double> gaussian_kernel(std::size_t n, double sigma) {
  std::vector<double> k(n);
  const double mid = (static_cast<double>(n) - 1.0) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(i) - mid;
    total += k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  for (double& v : k) v /= total;
  return k;
}

struct Plane {
  std::size_t h = 0, w = 0;
  std::vector<double> v;
  double& at(std::size_t y, std::size_t x) { return v[y * w + x]; }
  double at(std::size_t y, std::size_t x) const { return v[y * w + x]; }
};

Plane channel_plane(const Image& img, std::size_t c) {
  Plane p{img.height(), img.width(), std::vector<double>(img.height() * img.width())};
  for (std::size_t y = 0; y < p.h; ++y) {
    for (std::size_t x = 0; x < p.w; ++x) p.at(y, x) = unit(img.at(c, y, x));
  }
  return p;
}

Plane product(const Plane& a, const Plane& b) {
  Plane p = a;
  for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] *= b.v[i];
  return p;
}

// Separable 2-D filter; `valid` keeps only full windows, otherwise the
// output keeps the input size with reflect-101 borders.
Plane filter2d(const Plane& in, const std::vector<double>& k, bool valid) {
  const std::size_t n = k.size();
  const long r = static_cast<long>(n / 2);
  auto reflect = [](long i, long len) {
    if (len == 1) return 0L;
    while (i < 0 || i >= len) i = i < 0 ? -i : 2 * (len - 1) - i;
    return i;
  };
  if (valid) {
    if (in.h < n || in.w < n) throw ShapeError("image smaller than the filter window");
    Plane tmp{in.h, in.w - n + 1, {}};
    tmp.v.assign(tmp.h * tmp.w, 0.0);
    for (std::size_t y = 0; y < tmp.h; ++y) {
      for (std::size_t x = 0; x < tmp.w; ++x) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += k[j] * in.at(y, x + j);
        tmp.at(y, x) = s;
      }
    }
    Plane out{in.h - n + 1, tmp.w, {}};
    out.v.assign(out.h * out.w, 0.0);
    for (std::size_t y = 0; y < out.h; ++y) {
      for (std::size_t x = 0; x < out.w; ++x) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += k[j] * tmp.at(y + j, x);
        out.at(y, x) = s;
      }
    }
    return out;
  }
  Plane tmp{in.h, in.w, std::vector<double>(in.v.size(), 0.0)};
  const long h = static_cast<long>(in.h), w = static_cast<long>(in.w);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double s = 0.0;
      for (long j = -r; j <= r; ++j) s += k[static_cast<std::size_t>(j + r)] * in.at(y, reflect(x + j, w));
      tmp.at(y, x) = s;
    }
  }
  Plane out{in.h, in.w, std::vector<double>(in.v.size(), 0.0)};
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double s = 0.0;
      for (long j = -r; j <= r; ++j) s += k[static_cast<std::size_t>(j + r)] * tmp.at(reflect(y + j, h), x);
      out.at(y, x) = s;
    }
  }
  return out;
}

Plane downsample2(const Plane& in) {
  Plane out{(in.h + 1) / 2, (in.w + 1) / 2, {}};
  out.v.resize(out.h * out.w);
  for (std::size_t y = 0; y < out.h; ++y) {
    for (std::size_t x = 0; x < out.w; ++x) out.at(y, x) = in.at(2 * y, 2 * x);
  }
  return out;
}

Plane luma_255(const Image& img) {
  if (img.channels() != 3) throw ShapeError("luma conversion needs an RGB image");
  Plane p{img.height(), img.width(), std::vector<double>(img.height() * img.width())};
  for (std::size_t y = 0; y < p.h; ++y) {
    for (std::size_t x = 0; x < p.w; ++x) {
      p.at(y, x) = 255.0 * (0.299 * unit(img.at(0, y, x)) + 0.587 * unit(img.at(1, y, x)) +
                            0.114 * unit(img.at(2, y, x)));
    }
  }
  return p;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_same(a, b, "psnr");
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = unit(a.pixels()[i]) - unit(b.pixels()[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b) {
  require_same(a, b, "ssim");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto k = gaussian_kernel(11, 1.5);
  double total = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    const Plane pa = channel_plane(a, c), pb = channel_plane(b, c);
    const Plane mu_a = filter2d(pa, k, true), mu_b = filter2d(pb, k, true);
    const Plane saa = filter2d(product(pa, pa), k, true);
    const Plane sbb = filter2d(product(pb, pb), k, true);
    const Plane sab = filter2d(product(pa, pb), k, true);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_a.v.size(); ++i) {
      const double ma = mu_a.v[i], mb = mu_b.v[i];
      const double va = saa.v[i] - ma * ma, vb = sbb.v[i] - mb * mb, cov = sab.v[i] - ma * mb;
      acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total += acc / static_cast<double>(mu_a.v.size());
  }
  return total / static_cast<double>(a.channels());
}

VifpResult vifp_detailed(const Image& reference, const Image& distorted) {
  require_same(reference, distorted, "vifp");
  constexpr double sigma_nsq = 2.0;
  constexpr double tiny = 1e-10;
  Plane ref = luma_255(reference), dist = luma_255(distorted);
  double num = 0.0, den = 0.0;
  for (int scale = 1; scale <= 4; ++scale) {
    const std::size_t n = (std::size_t{1} << (4 - scale + 1)) + 1;
    const auto k = gaussian_kernel(n, static_cast<double>(n) / 5.0);
    if (scale > 1) {
      ref = downsample2(filter2d(ref, k, false));
      dist = downsample2(filter2d(dist, k, false));
    }
    const Plane mu1 = filter2d(ref, k, false), mu2 = filter2d(dist, k, false);
    const Plane s11 = filter2d(product(ref, ref), k, false);
    const Plane s22 = filter2d(product(dist, dist), k, false);
    const Plane s12 = filter2d(product(ref, dist), k, false);
    for (std::size_t i = 0; i < mu1.v.size(); ++i) {
      double sigma1_sq = std::max(0.0, s11.v[i] - mu1.v[i] * mu1.v[i]);
      const double sigma2_sq = std::max(0.0, s22.v[i] - mu2.v[i] * mu2.v[i]);
      const double sigma12 = s12.v[i] - mu1.v[i] * mu2.v[i];
      double g = sigma12 / (sigma1_sq + tiny);
      double sv_sq = sigma2_sq - g * sigma12;
      if (sigma1_sq < tiny) {
        g = 0.0;
        sv_sq = sigma2_sq;
        sigma1_sq = 0.0;
      }
      if (sigma2_sq < tiny) {
        g = 0.0;
        sv_sq = 0.0;
      }
      if (g < 0.0) {
        sv_sq = sigma2_sq;
        g = 0.0;
      }
      sv_sq = std::max(sv_sq, tiny);
      num += std::log10(1.0 + g * g * sigma1_sq / (sv_sq + sigma_nsq));
      den += std::log10(1.0 + sigma1_sq / sigma_nsq);
    }
  }
  if (den <= 0.0) return {reference == distorted ? 1.0 : 0.0, true};
  return {num / den, false};
}

double vifp(const Image& reference, const Image& distorted) {
  return vifp_detailed(reference, distorted).value;
}

Tensor lpips_proxy(const FeatureNet& net, const Tensor& a, const Tensor& b) {
  const auto fa = net.features(a);
  const auto fb = net.features(b);
  Tensor total;
  for (std::size_t s = 0; s < fa.size(); ++s) {
    const double channels = static_cast<double>(fa[s].dim(0));
    Tensor d = ops::scale(ops::mse(ops::normalize_channels(fa[s]), ops::normalize_channels(fb[s])), channels);
    total = total.defined() ? ops::add(total, d) : d;
  }
  return total;
}

double lpips_proxy(const FeatureNet& net, const Image& a, const Image& b) {
  NoGradGuard no_grad;
  return lpips_proxy(net, a.to_tensor(), b.to_tensor()).item();
}

std::vector<double> latent_distance_trajectory(const Autoencoder& ae, const Image& clean,
                                               const std::vector<Image>& trajectory) {
  NoGradGuard no_grad;
  auto unit_latent = [&](const Image& x, const char* what) {
    const Tensor z = ae.encode(x);
    double n2 = 0.0;
    for (double v : z.data()) n2 += v * v;
    if (!(n2 > 0.0)) throw std::domain_error(std::string(what) + " latent has zero norm");
    const double inv = 1.0 / std::sqrt(n2);
    std::vector<double> u(z.data().begin(), z.data().end());
    for (double& v : u) v *= inv;
    return u;
  };
  const auto zc = unit_latent(clean, "clean");
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (const auto& img : trajectory) {
    const auto zp = unit_latent(img, "purified");
    double d2 = 0.0;
    for (std::size_t i = 0; i < zc.size(); ++i) d2 += (zp[i] - zc[i]) * (zp[i] - zc[i]);
    out.push_back(std::sqrt(d2));
  }
  return out;
}

double consistency_loss(const Autoencoder& ae, const Image& x) {
  NoGradGuard no_grad;
  const Tensor t = x.to_tensor();
  return ops::mse(ae.reconstruct(t), t).item();
}

}  // namespace purlab
