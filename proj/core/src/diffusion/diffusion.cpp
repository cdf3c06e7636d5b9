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

#include "purlab/diffusion/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "purlab/autodiff/ops.hpp"
#include "purlab/autodiff/random.hpp"

namespace purlab {

NoiseSchedule::NoiseSchedule(std::size_t steps, double beta_min, double beta_max) {
  if (steps == 0) throw std::invalid_argument("noise schedule needs at least one step");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    throw std::invalid_argument("noise schedule bounds must satisfy 0 < beta_min <= beta_max < 1, got [" +
                                std::to_string(beta_min) + ", " + std::to_string(beta_max) + "]");
  }
  beta_.resize(steps);
  alpha_bar_.resize(steps + 1);
  alpha_bar_[0] = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    beta_[i] = beta_min + f * (beta_max - beta_min);
    alpha_bar_[i + 1] = alpha_bar_[i] * (1.0 - beta_[i]);
  }
}

double NoiseSchedule::beta(std::size_t t) const {
  if (t < 1 || t > steps()) throw std::out_of_range("beta index " + std::to_string(t) + " outside [1, T]");
  return beta_[t - 1];
}

double NoiseSchedule::alpha_bar(std::size_t t) const {
  if (t > steps()) throw std::out_of_range("alpha_bar index " + std::to_string(t) + " exceeds T");
  return alpha_bar_[t];
}

NoiseSchedule make_schedule(std::size_t steps, double beta_min, double beta_max) {
  return NoiseSchedule(steps, beta_min, beta_max);
}

Tensor q_sample(const NoiseSchedule& schedule, const Tensor& z, std::size_t t, const Tensor& eps) {
  if (z.shape() != eps.shape()) {
    throw ShapeError("q_sample: latent " + shape_str(z.shape()) + " vs noise " + shape_str(eps.shape()));
  }
  const double ab = schedule.alpha_bar(t);
  if (t == 0) return z;
  return std::sqrt(ab) * z + std::sqrt(1.0 - ab) * eps;
}

std::vector<std::size_t> sampler_timesteps(std::size_t start_t, std::size_t steps) {
  if (start_t == 0) return {0};
  if (steps == 0) throw std::invalid_argument("sampler needs at least one step");
  const std::size_t n = std::min(steps, start_t);
  std::vector<std::size_t> ts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    ts[k] = static_cast<std::size_t>(
        std::lround(static_cast<double>(start_t) * static_cast<double>(n - k) / static_cast<double>(n)));
  }
  return ts;
}

namespace {

Tensor ddim_update(const NoiseSchedule& schedule, const Tensor& z, const Tensor& eps_hat,
                   std::size_t t, std::size_t s) {
  const double at = schedule.alpha_bar(t);
  const double as = schedule.alpha_bar(s);
  // z_s = sqrt(as) z0_hat + sqrt(1 - as) eps_hat, folded into two coefficients.
  const double cz = std::sqrt(as / at);
  const double ce = std::sqrt(1.0 - as) - std::sqrt(as * (1.0 - at) / at);
  return cz * z + ce * eps_hat;
}

void check_sampler(const NoiseSchedule& schedule, const Denoiser& denoiser, const SamplerConfig& config) {
  if (config.start_t > schedule.steps()) {
    throw std::invalid_argument("sampler start_t " + std::to_string(config.start_t) + " exceeds T = " +
                                std::to_string(schedule.steps()));
  }
  if (denoiser.timesteps() != schedule.steps()) {
    throw ShapeError("denoiser trained for " + std::to_string(denoiser.timesteps()) +
                     " timesteps, schedule has " + std::to_string(schedule.steps()));
  }
  if (config.steps == 0) throw std::invalid_argument("sampler needs at least one step");
  if (!denoiser.finite()) throw std::runtime_error("denoiser parameters contain NaN or Inf");
}

}  // namespace

Tensor ddim_reverse(const NoiseSchedule& schedule, const Denoiser& denoiser, const Tensor& z_start,
                    const SamplerConfig& config) {
  if (config.start_t == 0) return z_start;
  check_sampler(schedule, denoiser, config);
  const auto ts = sampler_timesteps(config.start_t, config.steps);
  const std::size_t n = ts.size() - 1;
  if (config.grad_steps > n) {
    throw std::invalid_argument("cannot differentiate through " + std::to_string(config.grad_steps) +
                                " of " + std::to_string(n) + " sampler steps");
  }
  const std::size_t first_full = config.grad_steps == 0 ? 0 : n - config.grad_steps;
  Tensor z = z_start;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor eps_hat;
    if (i < first_full) {
      NoGradGuard no_grad;
      eps_hat = denoiser.predict(z.detach(), ts[i]);
    } else {
      eps_hat = denoiser.predict(z, ts[i]);
    }
    z = ddim_update(schedule, z, eps_hat, ts[i], ts[i + 1]);
  }
  return z;
}

SamplerConfig LatentDiffusion::sampler_for(double strength) const {
  if (!(strength > 0.0 && strength <= 1.0)) {
    throw std::invalid_argument("strength must lie in (0, 1], got " + std::to_string(strength));
  }
  SamplerConfig c;
  const double T = static_cast<double>(schedule.steps());
  c.start_t = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(strength * T)));
  c.steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(sampler_steps) * strength)));
  return c;
}

Tensor LatentDiffusion::to_latent(const Tensor& x) const {
  return autoencoder.latent_scale() * autoencoder.encode(x);
}

Tensor LatentDiffusion::from_latent(const Tensor& z) const {
  return autoencoder.decode((1.0 / autoencoder.latent_scale()) * z);
}

Tensor reconstruct_ldm(const LatentDiffusion& ldm, const Tensor& x, double strength,
                       const Tensor& eps, std::size_t grad_steps) {
  SamplerConfig config = ldm.sampler_for(strength);
  config.grad_steps = grad_steps;
  const Tensor z_t = q_sample(ldm.schedule, ldm.to_latent(x), config.start_t, eps);
  return ldm.from_latent(ddim_reverse(ldm.schedule, ldm.denoiser, z_t, config));
}

Tensor latent_noise(std::uint64_t seed) {
  return Rng(seed).substream("latent.noise").normal_tensor({kLatentChannels, kLatentSize, kLatentSize});
}

Image reconstruct_ldm(const LatentDiffusion& ldm, const Image& x, double strength, std::uint64_t seed) {
  NoGradGuard no_grad;
  return Image::from_tensor(reconstruct_ldm(ldm, x.to_tensor(), strength, latent_noise(seed)));
}

EditMask centered_square_mask(double area_fraction) {
  if (!(area_fraction >= 0.0 && area_fraction <= 1.0)) {
    throw std::invalid_argument("mask area fraction must lie in [0, 1]");
  }
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(area_fraction) * kImageSize));
  const std::size_t lo = (kImageSize - side) / 2;
  EditMask mask(kImageSize * kImageSize, 0.0);
  for (std::size_t y = lo; y < lo + side; ++y) {
    for (std::size_t x = lo; x < lo + side; ++x) mask[y * kImageSize + x] = 1.0;
  }
  return mask;
}

std::vector<double> latent_mask(const EditMask& mask) {
  if (mask.size() != kImageSize * kImageSize) {
    throw ShapeError("edit mask must have 32x32 entries, got " + std::to_string(mask.size()));
  }
  constexpr std::size_t f = kImageSize / kLatentSize;
  std::vector<double> m(kLatentChannels * kLatentSize * kLatentSize);
  for (std::size_t c = 0; c < kLatentChannels; ++c) {
    for (std::size_t i = 0; i < kLatentSize; ++i) {
      for (std::size_t j = 0; j < kLatentSize; ++j) {
        const double v = mask[(i * f + f / 2) * kImageSize + j * f + f / 2];
        if (v != 0.0 && v != 1.0) throw std::invalid_argument("edit mask must be binary");
        m[(c * kLatentSize + i) * kLatentSize + j] = v;
      }
    }
  }
  return m;
}

Image edit_image(const LatentDiffusion& ldm, const Image& x, const EditMask& mask, double strength,
                 const Tensor& eps) {
  NoGradGuard no_grad;
  const auto m = latent_mask(mask);
  const Shape latent_shape{kLatentChannels, kLatentSize, kLatentSize};
  const Tensor keep = Tensor::from(latent_shape, m);
  std::vector<double> inv(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) inv[i] = 1.0 - m[i];
  const Tensor regen = Tensor::from(latent_shape, inv);
  const bool nothing_kept = std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; });

  const SamplerConfig config = ldm.sampler_for(strength);
  check_sampler(ldm.schedule, ldm.denoiser, config);
  const Tensor z0 = ldm.to_latent(x.to_tensor());
  Tensor z = (nothing_kept && config.start_t == ldm.schedule.steps())
                 ? eps
                 : q_sample(ldm.schedule, z0, config.start_t, eps);
  const auto ts = sampler_timesteps(config.start_t, config.steps);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const Tensor eps_hat = ldm.denoiser.predict(z, ts[i]);
    z = ddim_update(ldm.schedule, z, eps_hat, ts[i], ts[i + 1]);
    const Tensor known = q_sample(ldm.schedule, z0, ts[i + 1], eps);
    z = keep * known + regen * z;
  }
  return Image::from_tensor(ldm.from_latent(z));
}

Image edit_image(const LatentDiffusion& ldm, const Image& x, const EditMask& mask, double strength,
                 std::uint64_t seed) {
  return edit_image(ldm, x, mask, strength, latent_noise(seed));
}

Image generate_sample(const LatentDiffusion& ldm, const Tensor& eps) {
  NoGradGuard no_grad;
  SamplerConfig config;
  config.start_t = ldm.schedule.steps();
  config.steps = ldm.sampler_steps;
  return Image::from_tensor(ldm.from_latent(ddim_reverse(ldm.schedule, ldm.denoiser, eps, config)));
}

}  // namespace purlab
