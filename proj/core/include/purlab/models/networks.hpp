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

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "purlab/autodiff/random.hpp"
#include "purlab/autodiff/tensor.hpp"
#include "purlab/models/image.hpp"
#include "purlab/models/params.hpp"

namespace purlab {

/// Deterministic convolutional autoencoder: 3x32x32 <-> 4x8x8.
///
/// Encoder: conv3x3/s2 3->32, conv3x3/s2 32->64, conv1x1 64->4 (SiLU between).
/// Decoder: conv1x1 4->64, two (nearest 2x upsample, conv3x3) blocks 64->32->3,
/// tanh output. `latent_scale` is a buffer set after training so that scaled
/// latents have unit variance for the diffusion model.
class Autoencoder {
 public:
  explicit Autoencoder(Rng& rng);
  explicit Autoencoder(ParamSet params);
  static Autoencoder load(const std::filesystem::path& path);

  Autoencoder(const Autoencoder& other) : params_(other.params_) { bind(); }
  Autoencoder& operator=(const Autoencoder& other) {
    if (this != &other) {
      params_ = other.params_;
      bind();
    }
    return *this;
  }

  /// (3,32,32) -> (4,8,8). Differentiable in x and the parameters.
  Tensor encode(const Tensor& x) const;
  /// (4,8,8) -> (3,32,32) in [-1,1].
  Tensor decode(const Tensor& z) const;
  Tensor reconstruct(const Tensor& x) const { return decode(encode(x)); }

  Tensor encode(const Image& x) const;
  Image decode_image(const Tensor& z) const;

  double latent_scale() const;
  void set_latent_scale(double s) { params_.set_buffer("meta.latent_scale", s); }

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  void save(const std::filesystem::path& path) const { params_.save(path); }

 private:
  void bind();

  ParamSet params_;
  Tensor enc1_w_, enc1_b_, enc2_w_, enc2_b_, enc3_w_, enc3_b_;
  Tensor dec1_w_, dec1_b_, dec2_w_, dec2_b_, dec3_w_, dec3_b_;
};

/// Sinusoidal timestep embedding, `dim` even: [sin(t f_i), cos(t f_i)].
Tensor timestep_embedding(std::size_t t, std::size_t dim = 32);

/// U-shaped epsilon predictor over 4x8x8 latents. Two down levels (4->32 at
/// 8x8, 32->64 at 4x4), a bottleneck, and two up levels with skip
/// concatenation. A learned projection of the timestep embedding is added
/// per channel at every level.
class Denoiser {
 public:
  Denoiser(std::size_t timesteps, Rng& rng);
  explicit Denoiser(ParamSet params);
  static Denoiser load(const std::filesystem::path& path);

  Denoiser(const Denoiser& other) : params_(other.params_) { bind(); }
  Denoiser& operator=(const Denoiser& other) {
    if (this != &other) {
      params_ = other.params_;
      bind();
    }
    return *this;
  }

  /// Predicted noise for z_t at timestep t in [1, timesteps].
  Tensor predict(const Tensor& z_t, std::size_t t) const;
  std::size_t timesteps() const;
  bool finite() const;

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  void save(const std::filesystem::path& path) const { params_.save(path); }

 private:
  void bind();
  Tensor time_bias(const Tensor& emb, std::size_t level) const;

  ParamSet params_;
  std::array<Tensor, 6> conv_w_, conv_b_;
  std::array<Tensor, 5> temb_w_, temb_b_;
};

struct StyleScores {
  std::vector<double> probabilities;
  std::size_t label = 0;
};

/// Three stride-2 conv stages (3->16->32->64) plus a linear head over K
/// classes. The stage activations double as the perceptual-distance trunk.
class FeatureNet {
 public:
  FeatureNet(std::size_t num_classes, Rng& rng);
  explicit FeatureNet(ParamSet params);
  static FeatureNet load(const std::filesystem::path& path);

  FeatureNet(const FeatureNet& other) : params_(other.params_) { bind(); }
  FeatureNet& operator=(const FeatureNet& other) {
    if (this != &other) {
      params_ = other.params_;
      bind();
    }
    return *this;
  }

  /// Stage activations of shapes (16,16,16), (32,8,8), (64,4,4).
  std::array<Tensor, 3> features(const Tensor& x) const;
  Tensor logits(const Tensor& x) const;
  StyleScores classify(const Image& x) const;
  std::size_t num_classes() const;

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  void save(const std::filesystem::path& path) const { params_.save(path); }

 private:
  void bind();

  ParamSet params_;
  std::array<Tensor, 3> stage_w_, stage_b_;
  Tensor head_w_, head_b_;
};

/// Softmax of raw logits with ties in the argmax broken toward the lowest index.
StyleScores softmax_scores(std::span<const double> logits);

}  // namespace purlab
