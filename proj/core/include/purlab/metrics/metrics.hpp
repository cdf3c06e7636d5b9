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

#include <vector>

#include "purlab/autodiff/tensor.hpp"
#include "purlab/models/image.hpp"
#include "purlab/models/networks.hpp"

namespace purlab {

inline constexpr double kPsnrCap = 100.0;

/// Pixels are mapped to [0, 1] (MAX = 1); identical images give the cap.
double psnr(const Image& a, const Image& b);

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, valid windows only, averaged over RGB channels.
double ssim(const Image& a, const Image& b);

struct VifpResult {
  double value = 0.0;
  /// Set when the reference carries no signal at any scale.
  bool degenerate = false;
};

/// Pixel-domain VIF on ITU-R 601 luma at 8-bit scale, 4 scales,
/// sigma_nsq = 2. `reference` is the first argument; the metric is not
/// symmetric.
VifpResult vifp_detailed(const Image& reference, const Image& distorted);
double vifp(const Image& reference, const Image& distorted);

/// Perceptual distance over the frozen feature trunk: for each stage,
/// unit-normalize across channels, squared difference summed over channels,
/// averaged over space; stages summed with equal weight. Differentiable in
/// both arguments.
Tensor lpips_proxy(const FeatureNet& net, const Tensor& a, const Tensor& b);
double lpips_proxy(const FeatureNet& net, const Image& a, const Image& b);

/// Distance between unit-normalized latents of each trajectory image and the
/// clean image.
std::vector<double> latent_distance_trajectory(const Autoencoder& ae, const Image& clean,
                                               const std::vector<Image>& trajectory);

/// ||x - D(E(x))||^2 as a per-pixel mean.
double consistency_loss(const Autoencoder& ae, const Image& x);

}  // namespace purlab
