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

#include "purlab/diffusion/diffusion.hpp"
#include "purlab/models/image.hpp"
#include "purlab/models/networks.hpp"

namespace purlab {

struct TrainConfig {
  std::size_t steps = 1000;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// Mean squared reconstruction error, one entry per step. Updates `ae`
/// in place; zero steps leave it untouched.
std::vector<double> train_autoencoder(Autoencoder& ae, const std::vector<Image>& data,
                                      const TrainConfig& config);

/// Sets the latent scale to 1 / std of the encoded dataset.
double calibrate_latent_scale(Autoencoder& ae, const std::vector<Image>& data);

/// Encodes and scales every image once; the denoiser trains on these.
std::vector<Tensor> encode_dataset(const Autoencoder& ae, const std::vector<Image>& data);

/// Unconditional epsilon-prediction loss, one entry per step. Starts from
/// the current parameters, so a trained denoiser is fine-tuned.
std::vector<double> train_denoiser(Denoiser& denoiser, const Autoencoder& ae,
                                   const std::vector<Image>& data, const NoiseSchedule& schedule,
                                   const TrainConfig& config);
std::vector<double> train_denoiser_on_latents(Denoiser& denoiser, const std::vector<Tensor>& latents,
                                              const NoiseSchedule& schedule, const TrainConfig& config);

/// Mean ||eps_hat - eps||^2 over `draws` seeded noisings of each latent.
double denoiser_eval_loss(const Denoiser& denoiser, const std::vector<Tensor>& latents,
                          const NoiseSchedule& schedule, std::size_t draws, std::uint64_t seed);

/// Cross-entropy training, one loss entry per step.
std::vector<double> train_style_classifier(FeatureNet& net, const std::vector<Image>& images,
                                           const std::vector<std::size_t>& labels,
                                           const TrainConfig& config);

double classifier_accuracy(const FeatureNet& net, const std::vector<Image>& images,
                           const std::vector<std::size_t>& labels);

/// confusion[true][predicted] counts.
std::vector<std::vector<std::size_t>> confusion_matrix(const FeatureNet& net,
                                                       const std::vector<Image>& images,
                                                       const std::vector<std::size_t>& labels);

/// Root mean squared reconstruction error over a set.
double reconstruction_rmse(const Autoencoder& ae, const std::vector<Image>& data);

}  // namespace purlab
