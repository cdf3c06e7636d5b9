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

#include "purlab/purify/purify.hpp"

#include <cstdio>
#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "purlab/autodiff/ops.hpp"
#include "purlab/autodiff/random.hpp"
#include "purlab/data/image_io.hpp"
#include "purlab/metrics/metrics.hpp"

namespace purlab {

void PurifyConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("purify alpha must be >= 0");
  if (!(lpips_budget >= 0.0)) throw std::invalid_argument("purify LPIPS budget must be >= 0");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("purify learning rate must be >= 0");
  if (!(init_sigma >= 0.0)) throw std::invalid_argument("purify init sigma must be >= 0");
}

PurifyConfig PurifyConfig::style_defaults() { return PurifyConfig{}; }

PurifyConfig PurifyConfig::edit_defaults() {
  PurifyConfig c;
  c.alpha = 1e-2;
  c.steps = 1000;
  c.learning_rate = 5e-3;
  return c;
}

PurifyResult impress_purify(const Autoencoder& ae, const FeatureNet& lpips_net, const Image& x_ptb,
                            const PurifyConfig& config) {
  config.validate();
  x_ptb.validate();
  Autoencoder frozen = ae;
  FeatureNet net = lpips_net;
  frozen.params().set_frozen(true);
  net.params().set_frozen(true);

  const Shape shape{x_ptb.channels(), x_ptb.height(), x_ptb.width()};
  const Tensor reference = x_ptb.to_tensor();
  Rng rng = Rng(config.seed).substream("impress.init");
  std::vector<double> p = x_ptb.pixels();
  for (double& v : p) v = std::clamp(v + config.init_sigma * rng.normal(), -1.0, 1.0);

  OptimizerConfig oc;
  oc.kind = config.optimizer;
  oc.learning_rate = config.learning_rate;
  Optimizer opt(oc);

  PurifyResult result;
  result.trajectory.reserve(config.steps + 1);
  auto snapshot = [&](std::size_t step) {
    result.snapshot_steps.push_back(step);
    result.snapshots.emplace_back(x_ptb.channels(), x_ptb.height(), x_ptb.width(), p);
  };
  auto evaluate = [&](const Tensor& x, std::size_t step, Tensor* combined) {
    const Tensor cons = ops::mse(x, frozen.reconstruct(x));
    const Tensor lp = lpips_proxy(net, x, reference);
    const Tensor total =
        ops::add(cons, ops::scale(ops::relu(ops::add_scalar(lp, -config.lpips_budget)), config.alpha));
    PurifyStep rec{step, cons.item(), lp.item(), total.item()};
    if (!std::isfinite(rec.combined)) {
      throw std::runtime_error("purification loss is not finite at step " + std::to_string(step) +
                               " (consistency " + std::to_string(rec.consistency) + ", lpips " +
                               std::to_string(rec.lpips) + ")");
    }
    if (combined) *combined = total;
    result.trajectory.push_back(rec);
  };

  snapshot(0);
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::vector<Tensor> params{Tensor::from(shape, p, true)};
    Tensor loss;
    evaluate(params[0], step, &loss);
    loss.backward();
    opt.step(params);
    p.assign(params[0].data().begin(), params[0].data().end());
    for (double& v : p) v = std::clamp(v, -1.0, 1.0);
    if (config.snapshot_every > 0 && (step + 1) % config.snapshot_every == 0 && step + 1 < config.steps) {
      snapshot(step + 1);
    }
  }
  {
    NoGradGuard no_grad;
    evaluate(Tensor::from(shape, p), config.steps, nullptr);
  }
  if (config.steps > 0) snapshot(config.steps);
  result.purified = Image(x_ptb.channels(), x_ptb.height(), x_ptb.width(), std::move(p));
  return result;
}

namespace {

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

std::vector<unsigned char> to_interleaved_8bit(const Image& x) {
  std::vector<unsigned char> buf(x.height() * x.width() * 3);
  for (std::size_t y = 0; y < x.height(); ++y) {
    for (std::size_t i = 0; i < x.width(); ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = (std::clamp(x.at(c, y, i), -1.0, 1.0) + 1.0) * 127.5;
        buf[(y * x.width() + i) * 3 + c] = static_cast<unsigned char>(std::lround(v));
      }
    }
  }
  return buf;
}

}  // namespace

Image jpeg_baseline(const Image& x, int quality) {
  if (quality < 1 || quality > 100) throw std::invalid_argument("JPEG quality must lie in [1, 100]");
  if (x.channels() != 3) throw ShapeError("JPEG baseline needs an RGB image");
  std::vector<unsigned char> pixels = to_interleaved_8bit(x);
  unsigned char* encoded = nullptr;
  unsigned long encoded_size = 0;

  jpeg_compress_struct cinfo{};
  JpegError cerr{};
  cinfo.err = jpeg_std_error(&cerr.mgr);
  cerr.mgr.error_exit = jpeg_error_exit;
  if (setjmp(cerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(encoded);
    throw std::runtime_error("JPEG encoding failed");
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &encoded, &encoded_size);
  cinfo.image_width = static_cast<JDIMENSION>(x.width());
  cinfo.image_height = static_cast<JDIMENSION>(x.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = pixels.data() + cinfo.next_scanline * x.width() * 3;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  jpeg_decompress_struct dinfo{};
  JpegError derr{};
  dinfo.err = jpeg_std_error(&derr.mgr);
  derr.mgr.error_exit = jpeg_error_exit;
  if (setjmp(derr.jump)) {
    jpeg_destroy_decompress(&dinfo);
    std::free(encoded);
    throw std::runtime_error("JPEG decoding failed");
  }
  jpeg_create_decompress(&dinfo);
  jpeg_mem_src(&dinfo, encoded, encoded_size);
  jpeg_read_header(&dinfo, TRUE);
  dinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&dinfo);
  if (dinfo.output_width != x.width() || dinfo.output_height != x.height() || dinfo.output_components != 3) {
    jpeg_destroy_decompress(&dinfo);
    std::free(encoded);
    throw std::runtime_error("JPEG round trip changed the image geometry");
  }
  while (dinfo.output_scanline < dinfo.output_height) {
    JSAMPROW row = pixels.data() + dinfo.output_scanline * x.width() * 3;
    jpeg_read_scanlines(&dinfo, &row, 1);
  }
  jpeg_finish_decompress(&dinfo);
  jpeg_destroy_decompress(&dinfo);
  std::free(encoded);

  Image out(x.channels(), x.height(), x.width());
  for (std::size_t y = 0; y < x.height(); ++y) {
    for (std::size_t i = 0; i < x.width(); ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        out.at(c, y, i) = pixels[(y * x.width() + i) * 3 + c] / 127.5 - 1.0;
      }
    }
  }
  return out;
}

Image gaussian_noise_baseline(const Image& x, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
  Rng rng = Rng(seed).substream("baseline.noise");
  const double sd = std::sqrt(variance);
  Image out = x;
  for (double& v : out.pixels()) v = std::clamp(v + sd * rng.normal(), -1.0, 1.0);
  return out;
}

Image resize_baseline(const Image& x) {
  const Image small = resize_bilinear(x, x.height() / 2, x.width() / 2);
  return resize_bilinear(small, x.height(), x.width()).clipped();
}

Image lowpass_baseline(const Image& x, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("low-pass sigma must be positive");
  const long r = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double total = 0.0;
  for (long i = -r; i <= r; ++i) {
    total += k[static_cast<std::size_t>(i + r)] = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
  }
  for (double& v : k) v /= total;
  auto reflect = [](long i, long n) {
    if (n == 1) return 0L;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
  };
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  Image tmp = x, out = x;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (long y = 0; y < h; ++y) {
      for (long i = 0; i < w; ++i) {
        double s = 0.0;
        for (long j = -r; j <= r; ++j) s += k[static_cast<std::size_t>(j + r)] * x.at(c, y, reflect(i + j, w));
        tmp.at(c, y, i) = s;
      }
    }
    for (long y = 0; y < h; ++y) {
      for (long i = 0; i < w; ++i) {
        double s = 0.0;
        for (long j = -r; j <= r; ++j) s += k[static_cast<std::size_t>(j + r)] * tmp.at(c, reflect(y + j, h), i);
        out.at(c, y, i) = std::clamp(s, -1.0, 1.0);
      }
    }
  }
  return out;
}

Image horizontal_flip(const Image& x) {
  Image out = x;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t y = 0; y < x.height(); ++y) {
      for (std::size_t i = 0; i < x.width(); ++i) out.at(c, y, i) = x.at(c, y, x.width() - 1 - i);
    }
  }
  return out;
}

Image combo_baseline(const Image& x) { return resize_baseline(horizontal_flip(jpeg_baseline(x))); }

PurifyMethod parse_purify_method(std::string_view name) {
  if (name == "impress") return PurifyMethod::kImpress;
  if (name == "jpeg") return PurifyMethod::kJpeg;
  if (name == "noise") return PurifyMethod::kNoise;
  if (name == "resize") return PurifyMethod::kResize;
  if (name == "lowpass") return PurifyMethod::kLowpass;
  if (name == "combo") return PurifyMethod::kCombo;
  throw std::invalid_argument("unknown purification method '" + std::string(name) + "'");
}

std::string trajectory_csv(const std::vector<PurifyStep>& trajectory) {
  std::string out = "step,consistency_loss,lpips_value,combined_loss\n";
  char line[128];
  for (const auto& s : trajectory) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", s.step, s.consistency, s.lpips, s.combined);
    out += line;
  }
  return out;
}

std::string_view to_string(PurifyMethod method) {
  switch (method) {
    case PurifyMethod::kImpress:
      return "impress";
    case PurifyMethod::kJpeg:
      return "jpeg";
    case PurifyMethod::kNoise:
      return "noise";
    case PurifyMethod::kResize:
      return "resize";
    case PurifyMethod::kLowpass:
      return "lowpass";
    default:
      return "combo";
  }
}

const std::vector<PurifyMethod>& baseline_methods() {
  static const std::vector<PurifyMethod> methods{PurifyMethod::kJpeg, PurifyMethod::kNoise,
                                                 PurifyMethod::kResize, PurifyMethod::kLowpass,
                                                 PurifyMethod::kCombo};
  return methods;
}

Image apply_baseline(PurifyMethod method, const Image& x, std::uint64_t seed) {
  switch (method) {
    case PurifyMethod::kJpeg:
      return jpeg_baseline(x);
    case PurifyMethod::kNoise:
      return gaussian_noise_baseline(x, kDefaultNoiseVariance, seed);
    case PurifyMethod::kResize:
      return resize_baseline(x);
    case PurifyMethod::kLowpass:
      return lowpass_baseline(x);
    case PurifyMethod::kCombo:
      return combo_baseline(x);
    default:
      throw std::invalid_argument("impress is not a post-processing baseline");
  }
}

}  // namespace purlab
