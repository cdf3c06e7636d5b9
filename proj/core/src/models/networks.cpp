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

#include "purlab/models/networks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "purlab/autodiff/ops.hpp"

namespace purlab {

namespace {

void expect_shape(const Tensor& t, const Shape& shape, const char* what) {
  if (t.shape() != shape) {
    throw ShapeError(std::string(what) + ": expected " + shape_str(shape) + ", got " +
                     shape_str(t.shape()));
  }
}

// Registers a conv layer; returns {weight, bias}.
std::pair<Tensor, Tensor> add_conv(ParamSet& p, const std::string& name, std::size_t in,
                                   std::size_t out, std::size_t k, Rng& rng, double gain = 1.0) {
  Tensor w = p.add_kaiming(name + ".weight", {out, in, k, k}, in * k * k, rng, gain);
  Tensor b = p.add_zeros(name + ".bias", {out});
  return {w, b};
}

}  // namespace

// ---------------------------------------------------------------------------
// Autoencoder

Autoencoder::Autoencoder(Rng& rng) {
  Rng init = rng.substream("autoencoder.init");
  add_conv(params_, "enc1", 3, 32, 3, init);
  add_conv(params_, "enc2", 32, 64, 3, init);
  add_conv(params_, "enc3", 64, 4, 1, init);
  add_conv(params_, "dec1", 4, 64, 1, init);
  add_conv(params_, "dec2", 64, 32, 3, init);
  add_conv(params_, "dec3", 32, 3, 3, init);
  params_.add_buffer("meta.latent_scale", Tensor::scalar(1.0));
  bind();
}

Autoencoder::Autoencoder(ParamSet params) : params_(std::move(params)) { bind(); }

Autoencoder Autoencoder::load(const std::filesystem::path& path) {
  return Autoencoder(ParamSet::load(path));
}

void Autoencoder::bind() {
  auto get = [&](const char* n) { return params_.get(n); };
  enc1_w_ = get("enc1.weight"), enc1_b_ = get("enc1.bias");
  enc2_w_ = get("enc2.weight"), enc2_b_ = get("enc2.bias");
  enc3_w_ = get("enc3.weight"), enc3_b_ = get("enc3.bias");
  dec1_w_ = get("dec1.weight"), dec1_b_ = get("dec1.bias");
  dec2_w_ = get("dec2.weight"), dec2_b_ = get("dec2.bias");
  dec3_w_ = get("dec3.weight"), dec3_b_ = get("dec3.bias");
  expect_shape(enc1_w_, {32, 3, 3, 3}, "autoencoder enc1");
  expect_shape(enc3_w_, {4, 64, 1, 1}, "autoencoder enc3");
  expect_shape(dec3_w_, {3, 32, 3, 3}, "autoencoder dec3");
  get("meta.latent_scale");
}

Tensor Autoencoder::encode(const Tensor& x) const {
  expect_shape(x, {kImageChannels, kImageSize, kImageSize}, "encode");
  Tensor h = ops::silu(ops::conv2d(x, enc1_w_, enc1_b_, 2, 1));
  h = ops::silu(ops::conv2d(h, enc2_w_, enc2_b_, 2, 1));
  return ops::conv2d(h, enc3_w_, enc3_b_, 1, 0);
}

Tensor Autoencoder::decode(const Tensor& z) const {
  expect_shape(z, {kLatentChannels, kLatentSize, kLatentSize}, "decode");
  Tensor h = ops::silu(ops::conv2d(z, dec1_w_, dec1_b_, 1, 0));
  h = ops::silu(ops::conv2d(ops::upsample_nearest2x(h), dec2_w_, dec2_b_, 1, 1));
  return ops::tanh(ops::conv2d(ops::upsample_nearest2x(h), dec3_w_, dec3_b_, 1, 1));
}

Tensor Autoencoder::encode(const Image& x) const { return encode(x.to_tensor()); }

Image Autoencoder::decode_image(const Tensor& z) const { return Image::from_tensor(decode(z)); }

double Autoencoder::latent_scale() const { return params_.get("meta.latent_scale").item(); }

// ---------------------------------------------------------------------------
// Denoiser

namespace {
constexpr std::size_t kEmbedDim = 32;
constexpr std::array<std::size_t, 5> kLevelChannels{32, 64, 64, 64, 32};
}  // namespace

Tensor timestep_embedding(std::size_t t, std::size_t dim) {
  if (dim % 2 != 0) throw std::invalid_argument("timestep embedding dim must be even");
  const std::size_t half = dim / 2;
  std::vector<double> e(dim);
  for (std::size_t i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
    e[i] = std::sin(static_cast<double>(t) * freq);
    e[half + i] = std::cos(static_cast<double>(t) * freq);
  }
  return Tensor::from({dim, 1}, std::move(e));
}

Denoiser::Denoiser(std::size_t timesteps, Rng& rng) {
  if (timesteps == 0) throw std::invalid_argument("denoiser needs at least one timestep");
  Rng init = rng.substream("denoiser.init");
  add_conv(params_, "conv0", 4, 32, 3, init);     // level 1 in
  add_conv(params_, "conv1", 32, 64, 3, init);    // level 2 down (stride 2)
  add_conv(params_, "conv2", 64, 64, 3, init);    // bottleneck
  add_conv(params_, "conv3", 128, 64, 3, init);   // level 2 up, skip from conv1
  add_conv(params_, "conv4", 96, 32, 3, init);    // level 1 up, skip from conv0
  add_conv(params_, "conv5", 32, 4, 3, init, 0.1);
  for (std::size_t l = 0; l < kLevelChannels.size(); ++l) {
    const std::string name = "temb" + std::to_string(l);
    params_.add_kaiming(name + ".weight", {kLevelChannels[l], kEmbedDim}, kEmbedDim, init, 0.5);
    params_.add_zeros(name + ".bias", {kLevelChannels[l], 1});
  }
  params_.add_buffer("meta.timesteps", Tensor::scalar(static_cast<double>(timesteps)));
  bind();
}

Denoiser::Denoiser(ParamSet params) : params_(std::move(params)) { bind(); }

Denoiser Denoiser::load(const std::filesystem::path& path) { return Denoiser(ParamSet::load(path)); }

void Denoiser::bind() {
  for (std::size_t i = 0; i < conv_w_.size(); ++i) {
    conv_w_[i] = params_.get("conv" + std::to_string(i) + ".weight");
    conv_b_[i] = params_.get("conv" + std::to_string(i) + ".bias");
  }
  for (std::size_t i = 0; i < temb_w_.size(); ++i) {
    temb_w_[i] = params_.get("temb" + std::to_string(i) + ".weight");
    temb_b_[i] = params_.get("temb" + std::to_string(i) + ".bias");
  }
  expect_shape(conv_w_[0], {32, 4, 3, 3}, "denoiser conv0");
  expect_shape(conv_w_[5], {4, 32, 3, 3}, "denoiser conv5");
  if (timesteps() == 0) throw ShapeError("denoiser file has zero timesteps");
}

std::size_t Denoiser::timesteps() const {
  return static_cast<std::size_t>(params_.get("meta.timesteps").item());
}

bool Denoiser::finite() const {
  for (const auto& e : params_.entries()) {
    for (double v : e.tensor.data()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

Tensor Denoiser::time_bias(const Tensor& emb, std::size_t level) const {
  Tensor proj = ops::add(ops::matmul(temb_w_[level], emb), temb_b_[level]);
  return ops::reshape(proj, {kLevelChannels[level]});
}

Tensor Denoiser::predict(const Tensor& z_t, std::size_t t) const {
  expect_shape(z_t, {kLatentChannels, kLatentSize, kLatentSize}, "denoiser input");
  if (t < 1 || t > timesteps()) {
    throw std::out_of_range("timestep " + std::to_string(t) + " outside [1, " +
                            std::to_string(timesteps()) + "]");
  }
  const Tensor emb = timestep_embedding(t, kEmbedDim);
  auto block = [&](const Tensor& x, std::size_t i, std::size_t stride) {
    Tensor h = ops::conv2d(x, conv_w_[i], conv_b_[i], stride, 1);
    return ops::silu(ops::add_channel_bias(h, time_bias(emb, i)));
  };
  Tensor h1 = block(z_t, 0, 1);                                    // 32x8x8
  Tensor h2 = block(h1, 1, 2);                                     // 64x4x4
  Tensor mid = block(h2, 2, 1);                                    // 64x4x4
  Tensor u2 = block(ops::concat_channels({mid, h2}), 3, 1);        // 64x4x4
  Tensor up = ops::upsample_nearest2x(u2);                         // 64x8x8
  Tensor u1 = block(ops::concat_channels({up, h1}), 4, 1);         // 32x8x8
  return ops::conv2d(u1, conv_w_[5], conv_b_[5], 1, 1);            // 4x8x8
}

// ---------------------------------------------------------------------------
// FeatureNet

FeatureNet::FeatureNet(std::size_t num_classes, Rng& rng) {
  if (num_classes < 2) throw std::invalid_argument("style classifier needs at least two classes");
  Rng init = rng.substream("featurenet.init");
  add_conv(params_, "stage1", 3, 16, 3, init);
  add_conv(params_, "stage2", 16, 32, 3, init);
  add_conv(params_, "stage3", 32, 64, 3, init);
  params_.add_kaiming("head.weight", {num_classes, 64 * 4 * 4}, 64 * 4 * 4, init, 0.5);
  params_.add_zeros("head.bias", {num_classes, 1});
  bind();
}

FeatureNet::FeatureNet(ParamSet params) : params_(std::move(params)) { bind(); }

FeatureNet FeatureNet::load(const std::filesystem::path& path) {
  return FeatureNet(ParamSet::load(path));
}

void FeatureNet::bind() {
  for (std::size_t i = 0; i < 3; ++i) {
    stage_w_[i] = params_.get("stage" + std::to_string(i + 1) + ".weight");
    stage_b_[i] = params_.get("stage" + std::to_string(i + 1) + ".bias");
  }
  head_w_ = params_.get("head.weight");
  head_b_ = params_.get("head.bias");
  expect_shape(stage_w_[0], {16, 3, 3, 3}, "feature net stage1");
  if (head_w_.rank() != 2 || head_w_.dim(1) != 64 * 4 * 4) {
    throw ShapeError("feature net head has shape " + shape_str(head_w_.shape()));
  }
}

std::size_t FeatureNet::num_classes() const { return head_w_.dim(0); }

std::array<Tensor, 3> FeatureNet::features(const Tensor& x) const {
  expect_shape(x, {kImageChannels, kImageSize, kImageSize}, "feature net input");
  std::array<Tensor, 3> out;
  Tensor h = x;
  for (std::size_t i = 0; i < 3; ++i) {
    h = ops::silu(ops::conv2d(h, stage_w_[i], stage_b_[i], 2, 1));
    out[i] = h;
  }
  return out;
}

Tensor FeatureNet::logits(const Tensor& x) const {
  Tensor flat = ops::reshape(features(x)[2], {64 * 4 * 4, 1});
  return ops::reshape(ops::add(ops::matmul(head_w_, flat), head_b_), {num_classes()});
}

StyleScores softmax_scores(std::span<const double> logits) {
  StyleScores s;
  double mx = logits[0];
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > mx) {
      mx = logits[i];
      s.label = i;
    }
  }
  double z = 0.0;
  s.probabilities.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) z += s.probabilities[i] = std::exp(logits[i] - mx);
  for (double& p : s.probabilities) p /= z;
  return s;
}

StyleScores FeatureNet::classify(const Image& x) const {
  NoGradGuard no_grad;
  Tensor l = logits(x.to_tensor());
  return softmax_scores(l.data());
}

}  // namespace purlab
