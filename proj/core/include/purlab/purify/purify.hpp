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
#include <string>
#include <string_view>
#include <vector>

#include "purlab/autodiff/optimizer.hpp"
#include "purlab/models/image.hpp"
#include "purlab/models/networks.hpp"

namespace purlab {

struct PurifyConfig {
  double alpha = 0.1;          // weight of the LPIPS hinge
  double lpips_budget = 0.1;   // Delta_L
  double learning_rate = 1e-2;
  std::size_t steps = 3000;
  double init_sigma = 0.05;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  /// Keep x_pur every `snapshot_every` steps (0 keeps only the first and last).
  std::size_t snapshot_every = 0;

  void validate() const;
  static PurifyConfig style_defaults();
  static PurifyConfig edit_defaults();
};

struct PurifyStep {
  std::size_t step = 0;
  double consistency = 0.0;
  double lpips = 0.0;
  double combined = 0.0;
};

struct PurifyResult {
  Image purified;
  /// Entry i holds the losses at iterate i, i = 0..steps; the last entry
  /// describes the returned image.
  std::vector<PurifyStep> trajectory;
  std::vector<std::size_t> snapshot_steps;
  std::vector<Image> snapshots;
};

/// min ||x - D(E(x))||^2 + alpha max(LPIPS(x, x_ptb) - Delta_L, 0), from
/// x_ptb + N(0, sigma^2), clipping to [-1, 1] after every update.
PurifyResult impress_purify(const Autoencoder& ae, const FeatureNet& lpips_net, const Image& x_ptb,
                            const PurifyConfig& config);

/// CSV with header step,consistency_loss,lpips_value,combined_loss.
std::string trajectory_csv(const std::vector<PurifyStep>& trajectory);

inline constexpr int kDefaultJpegQuality = 15;
inline constexpr double kDefaultNoiseVariance = 0.15;
inline constexpr double kDefaultLowpassSigma = 1.0;

Image jpeg_baseline(const Image& x, int quality = kDefaultJpegQuality);
Image gaussian_noise_baseline(const Image& x, double variance, std::uint64_t seed);
/// Bilinear 2x down, then bilinear back up.
Image resize_baseline(const Image& x);
/// Gaussian blur, kernel 2 ceil(3 sigma) + 1, reflect-101 borders.
Image lowpass_baseline(const Image& x, double sigma = kDefaultLowpassSigma);
Image horizontal_flip(const Image& x);
/// resize(flip(jpeg(x, 15))).
Image combo_baseline(const Image& x);

enum class PurifyMethod { kImpress, kJpeg, kNoise, kResize, kLowpass, kCombo };
PurifyMethod parse_purify_method(std::string_view name);
std::string_view to_string(PurifyMethod method);
/// The five post-processing baselines in a fixed order.
const std::vector<PurifyMethod>& baseline_methods();

/// Applies a baseline with its default parameters; `seed` only matters for noise.
Image apply_baseline(PurifyMethod method, const Image& x, std::uint64_t seed);

}  // namespace purlab
