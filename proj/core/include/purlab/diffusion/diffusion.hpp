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
#include <cstdint>
#include <vector>

#include "purlab/autodiff/tensor.hpp"
#include "purlab/models/image.hpp"
#include "purlab/models/networks.hpp"

namespace purlab {

/// Linear beta schedule. alpha_bar(0) is 1; valid timesteps are 1..T.
class NoiseSchedule {
 public:
  NoiseSchedule(std::size_t steps, double beta_min, double beta_max);

  std::size_t steps() const { return beta_.size(); }
  double beta(std::size_t t) const;
  double alpha_bar(std::size_t t) const;
  const std::vector<double>& betas() const { return beta_; }

 private:
  std::vector<double> beta_;       // beta_[t - 1]
  std::vector<double> alpha_bar_;  // alpha_bar_[t], alpha_bar_[0] = 1
};

inline constexpr std::size_t kDefaultTimesteps = 100;
inline constexpr double kDefaultBetaMin = 1e-4;
inline constexpr double kDefaultBetaMax = 0.12;
inline constexpr std::size_t kDefaultSamplerSteps = 20;

NoiseSchedule make_schedule(std::size_t steps = kDefaultTimesteps, double beta_min = kDefaultBetaMin,
                            double beta_max = kDefaultBetaMax);

/// z_t = sqrt(abar_t) z + sqrt(1 - abar_t) eps. Differentiable in z.
Tensor q_sample(const NoiseSchedule& schedule, const Tensor& z, std::size_t t, const Tensor& eps);

struct SamplerConfig {
  std::size_t steps = kDefaultSamplerSteps;
  std::size_t start_t = kDefaultTimesteps;
  /// When gradients are recorded, only the last `grad_steps` updates
  /// differentiate through the denoiser. Earlier updates keep the linear
  /// path through z_t but treat the predicted noise as constant.
  /// Zero means every step is fully differentiated.
  std::size_t grad_steps = 0;
};

/// Timesteps visited by the sampler: start_t, ..., 0, evenly spaced.
std::vector<std::size_t> sampler_timesteps(std::size_t start_t, std::size_t steps);

/// Deterministic (eta = 0) DDIM recursion from z_start at start_t down to 0.
Tensor ddim_reverse(const NoiseSchedule& schedule, const Denoiser& denoiser, const Tensor& z_start,
                    const SamplerConfig& config);

/// Frozen autoencoder + denoiser + schedule, the pieces of f_LDM.
struct LatentDiffusion {
  const Autoencoder& autoencoder;
  const Denoiser& denoiser;
  NoiseSchedule schedule;
  std::size_t sampler_steps = kDefaultSamplerSteps;

  /// start_t = max(1, round(strength T)); the sampler uses
  /// max(1, round(sampler_steps strength)) steps.
  SamplerConfig sampler_for(double strength) const;
  Tensor to_latent(const Tensor& x) const;
  Tensor from_latent(const Tensor& z) const;
};

inline constexpr double kDefaultStrength = 0.6;

/// f_LDM(x) = D(ddim(q_sample(E(x), start_t, eps))). `eps` is the (4,8,8)
/// noising draw; `grad_steps` follows SamplerConfig.
Tensor reconstruct_ldm(const LatentDiffusion& ldm, const Tensor& x, double strength,
                       const Tensor& eps, std::size_t grad_steps = 0);
Image reconstruct_ldm(const LatentDiffusion& ldm, const Image& x, double strength,
                      std::uint64_t seed);

/// Pixel mask over 32x32, 1 = keep.
using EditMask = std::vector<double>;

/// Centered square covering `area_fraction` of the image.
EditMask centered_square_mask(double area_fraction = 0.25);
/// Nearest-neighbour 4x downsample to the 8x8 latent grid.
std::vector<double> latent_mask(const EditMask& mask);

/// Masked regeneration: the kept region is re-imposed from the noised
/// source latent after every reverse step, the rest is regenerated. An
/// all-zero mask at strength 1 starts from eps alone and ignores x.
Image edit_image(const LatentDiffusion& ldm, const Image& x, const EditMask& mask, double strength,
                 const Tensor& eps);
Image edit_image(const LatentDiffusion& ldm, const Image& x, const EditMask& mask, double strength,
                 std::uint64_t seed);

/// Unconditional sample from pure noise at T.
Image generate_sample(const LatentDiffusion& ldm, const Tensor& eps);

/// The (4,8,8) noise draw used by the seeded overloads.
Tensor latent_noise(std::uint64_t seed);

}  // namespace purlab
