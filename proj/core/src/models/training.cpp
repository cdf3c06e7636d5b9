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

#include "purlab/models/training.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "purlab/autodiff/ops.hpp"
#include "purlab/autodiff/optimizer.hpp"
#include "purlab/autodiff/random.hpp"

namespace purlab {

namespace {

void check_config(const TrainConfig& config) {
  if (config.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

Optimizer make_adam(double lr) {
  OptimizerConfig oc;
  oc.kind = OptimizerKind::kAdam;
  oc.learning_rate = lr;
  return Optimizer(oc);
}

// Runs `steps` minibatch updates; `sample_loss(rng)` builds one sample's
// loss graph. Gradients of the batch mean accumulate across samples.
template <typename SampleLoss>
std::vector<double> run_training(std::vector<Tensor> params, const TrainConfig& config,
                                 Rng rng, SampleLoss&& sample_loss) {
  Optimizer opt = make_adam(config.learning_rate);
  std::vector<double> curve;
  curve.reserve(config.steps);
  const double inv_batch = 1.0 / static_cast<double>(config.batch_size);
  for (std::size_t step = 0; step < config.steps; ++step) {
    opt.zero_grad(params);
    double total = 0.0;
    for (std::size_t b = 0; b < config.batch_size; ++b) {
      Tensor loss = sample_loss(rng);
      total += loss.item();
      ops::scale(loss, inv_batch).backward();
    }
    const double mean = total * inv_batch;
    if (!std::isfinite(mean)) {
      throw std::runtime_error("training diverged at step " + std::to_string(step));
    }
    opt.step(params);
    curve.push_back(mean);
  }
  return curve;
}

}  // namespace

std::vector<double> train_autoencoder(Autoencoder& ae, const std::vector<Image>& data,
                                      const TrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("autoencoder training needs a nonempty dataset");
  check_config(config);
  std::vector<Tensor> inputs;
  inputs.reserve(data.size());
  for (const auto& img : data) {
    img.validate();
    inputs.push_back(img.to_tensor());
  }
  return run_training(ae.params().trainable(), config, Rng(config.seed).substream("train.autoencoder"),
                      [&](Rng& rng) {
                        const Tensor& x = inputs[rng.uniform_index(inputs.size())];
                        return ops::mse(ae.reconstruct(x), x);
                      });
}

double calibrate_latent_scale(Autoencoder& ae, const std::vector<Image>& data) {
  if (data.empty()) throw std::invalid_argument("latent calibration needs a nonempty dataset");
  NoGradGuard no_grad;
  double s1 = 0.0, s2 = 0.0;
  std::size_t n = 0;
  for (const auto& img : data) {
    const Tensor z = ae.encode(img);
    for (double v : z.data()) {
      s1 += v;
      s2 += v * v;
      ++n;
    }
  }
  const double mean = s1 / static_cast<double>(n);
  const double var = s2 / static_cast<double>(n) - mean * mean;
  const double scale = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  ae.set_latent_scale(scale);
  return scale;
}

std::vector<Tensor> encode_dataset(const Autoencoder& ae, const std::vector<Image>& data) {
  NoGradGuard no_grad;
  std::vector<Tensor> out;
  out.reserve(data.size());
  const double s = ae.latent_scale();
  for (const auto& img : data) out.push_back(ops::scale(ae.encode(img), s));
  return out;
}

std::vector<double> train_denoiser_on_latents(Denoiser& denoiser, const std::vector<Tensor>& latents,
                                              const NoiseSchedule& schedule, const TrainConfig& config) {
  if (latents.empty()) throw std::invalid_argument("denoiser training needs a nonempty dataset");
  check_config(config);
  if (denoiser.timesteps() != schedule.steps()) {
    throw ShapeError("denoiser expects " + std::to_string(denoiser.timesteps()) +
                     " timesteps but the schedule has " + std::to_string(schedule.steps()));
  }
  const Shape latent_shape{kLatentChannels, kLatentSize, kLatentSize};
  for (const auto& z : latents) {
    if (z.shape() != latent_shape) {
      throw ShapeError("denoiser training latent has shape " + shape_str(z.shape()) + ", expected " +
                       shape_str(latent_shape));
    }
  }
  const std::size_t T = schedule.steps();
  return run_training(denoiser.params().trainable(), config, Rng(config.seed).substream("train.denoiser"),
                      [&](Rng& rng) {
                        const Tensor& z = latents[rng.uniform_index(latents.size())];
                        const std::size_t t = 1 + rng.uniform_index(T);
                        const Tensor eps = rng.normal_tensor(latent_shape);
                        return ops::mse(denoiser.predict(q_sample(schedule, z, t, eps), t), eps);
                      });
}

std::vector<double> train_denoiser(Denoiser& denoiser, const Autoencoder& ae,
                                   const std::vector<Image>& data, const NoiseSchedule& schedule,
                                   const TrainConfig& config) {
  if (data.empty()) throw std::invalid_argument("denoiser training needs a nonempty dataset");
  return train_denoiser_on_latents(denoiser, encode_dataset(ae, data), schedule, config);
}

double denoiser_eval_loss(const Denoiser& denoiser, const std::vector<Tensor>& latents,
                          const NoiseSchedule& schedule, std::size_t draws, std::uint64_t seed) {
  if (latents.empty() || draws == 0) throw std::invalid_argument("denoiser evaluation needs samples");
  NoGradGuard no_grad;
  Rng rng = Rng(seed).substream("eval.denoiser");
  double total = 0.0;
  for (const auto& z : latents) {
    for (std::size_t d = 0; d < draws; ++d) {
      const std::size_t t = 1 + rng.uniform_index(schedule.steps());
      const Tensor eps = rng.normal_tensor(z.shape());
      total += ops::mse(denoiser.predict(q_sample(schedule, z, t, eps), t), eps).item();
    }
  }
  return total / static_cast<double>(latents.size() * draws);
}

std::vector<double> train_style_classifier(FeatureNet& net, const std::vector<Image>& images,
                                           const std::vector<std::size_t>& labels,
                                           const TrainConfig& config) {
  if (images.empty() || images.size() != labels.size()) {
    throw std::invalid_argument("classifier training needs one label per image");
  }
  check_config(config);
  std::vector<std::size_t> counts(net.num_classes(), 0);
  for (std::size_t l : labels) {
    if (l >= net.num_classes()) throw std::invalid_argument("label " + std::to_string(l) + " out of range");
    ++counts[l];
  }
  std::size_t present = 0;
  for (std::size_t c : counts) present += c > 0 ? 1 : 0;
  if (present < 2) throw std::invalid_argument("classifier training needs at least two classes");
  std::vector<Tensor> inputs;
  inputs.reserve(images.size());
  for (const auto& img : images) inputs.push_back(img.to_tensor());
  return run_training(net.params().trainable(), config, Rng(config.seed).substream("train.classifier"),
                      [&](Rng& rng) {
                        const std::size_t i = rng.uniform_index(inputs.size());
                        return ops::cross_entropy(net.logits(inputs[i]), labels[i]);
                      });
}

std::vector<std::vector<std::size_t>> confusion_matrix(const FeatureNet& net,
                                                       const std::vector<Image>& images,
                                                       const std::vector<std::size_t>& labels) {
  if (images.size() != labels.size()) throw std::invalid_argument("one label per image required");
  const std::size_t k = net.num_classes();
  std::vector<std::vector<std::size_t>> m(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < images.size(); ++i) ++m.at(labels[i]).at(net.classify(images[i]).label);
  return m;
}

double classifier_accuracy(const FeatureNet& net, const std::vector<Image>& images,
                           const std::vector<std::size_t>& labels) {
  if (images.empty()) throw std::invalid_argument("accuracy needs at least one image");
  const auto m = confusion_matrix(net, images, labels);
  std::size_t hit = 0;
  for (std::size_t c = 0; c < m.size(); ++c) hit += m[c][c];
  return static_cast<double>(hit) / static_cast<double>(images.size());
}

double reconstruction_rmse(const Autoencoder& ae, const std::vector<Image>& data) {
  if (data.empty()) throw std::invalid_argument("rmse needs at least one image");
  NoGradGuard no_grad;
  double total = 0.0;
  for (const auto& img : data) {
    const Tensor x = img.to_tensor();
    total += ops::mse(ae.reconstruct(x), x).item();
  }
  return std::sqrt(total / static_cast<double>(data.size()));
}

}  // namespace purlab
