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

#include <benchmark/benchmark.h>

#include "purlab/attacks/attacks.hpp"
#include "purlab/autodiff/ops.hpp"
#include "purlab/data/styles.hpp"
#include "purlab/diffusion/diffusion.hpp"
#include "purlab/metrics/metrics.hpp"
#include "purlab/models/training.hpp"
#include "purlab/purify/purify.hpp"

namespace purlab {
namespace {

Tensor noise(Shape shape, std::uint64_t seed, bool grad = false) {
  Rng rng(seed);
  Tensor t = rng.normal_tensor(std::move(shape));
  t.set_requires_grad(grad);
  return t;
}

// Args: in channels, out channels, spatial size, stride.
void BM_Conv2dForwardBackward(benchmark::State& state) {
  const auto ci = static_cast<std::size_t>(state.range(0)), co = static_cast<std::size_t>(state.range(1));
  const auto hw = static_cast<std::size_t>(state.range(2)), stride = static_cast<std::size_t>(state.range(3));
  const Tensor x = noise({ci, hw, hw}, 1, true);
  const Tensor w = noise({co, ci, 3, 3}, 2, true);
  const Tensor b = noise({co}, 3, true);
  for (auto _ : state) {
    ops::sum(ops::conv2d(x, w, b, stride, 1)).backward();
    benchmark::DoNotOptimize(w.grad().data());
  }
}
BENCHMARK(BM_Conv2dForwardBackward)->Args({3, 32, 32, 2})->Args({32, 64, 16, 2})->Args({64, 32, 16, 1})->Args({32, 3, 32, 1});

void BM_AutoencoderTrainStep(benchmark::State& state) {
  Rng rng(4);
  Autoencoder ae(rng);
  StyleDatasetSpec spec;
  spec.images_per_style = 2;
  const auto data = images_of(generate_style_dataset(spec));
  const TrainConfig cfg{1, 8, 1e-3, 0};
  for (auto _ : state) benchmark::DoNotOptimize(train_autoencoder(ae, data, cfg));
}
BENCHMARK(BM_AutoencoderTrainStep)->Unit(benchmark::kMillisecond);

void BM_DenoiserForward(benchmark::State& state) {
  Rng rng(5);
  Denoiser den(kDefaultTimesteps, rng);
  const Tensor z = noise({4, 8, 8}, 6);
  NoGradGuard g;
  for (auto _ : state) benchmark::DoNotOptimize(den.predict(z, 50));
}
BENCHMARK(BM_DenoiserForward);

void BM_ImpressStep(benchmark::State& state) {
  Rng rng(7);
  Autoencoder ae(rng);
  FeatureNet net(4, rng);
  const Image x = render_style(0, {});
  PurifyConfig cfg;
  cfg.steps = 10;
  for (auto _ : state) benchmark::DoNotOptimize(impress_purify(ae, net, x, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_ImpressStep)->Unit(benchmark::kMillisecond);

void BM_GlazeStep(benchmark::State& state) {
  Rng rng(8);
  Autoencoder ae(rng);
  FeatureNet net(4, rng);
  const StyledImage x{render_style(0, {}), 0, {}};
  AttackConfig cfg = AttackConfig::adaptive_defaults();
  cfg.steps = 10;
  cfg.target_style = 1;
  for (auto _ : state) benchmark::DoNotOptimize(adaptive_glaze_protect(ae, net, x, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_GlazeStep)->Unit(benchmark::kMillisecond);

void BM_DdimReconstruct(benchmark::State& state) {
  Rng rng(9);
  Autoencoder ae(rng);
  Denoiser den(kDefaultTimesteps, rng);
  const LatentDiffusion ldm{ae, den, make_schedule()};
  const Image x = render_style(2, {});
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_ldm(ldm, x, kDefaultStrength, 1));
}
BENCHMARK(BM_DdimReconstruct)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const Image a = render_style(0, {}), b = render_style(1, {});
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim);

}  // namespace
}  // namespace purlab

BENCHMARK_MAIN();
