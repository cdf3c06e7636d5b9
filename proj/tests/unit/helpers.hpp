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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "purlab/autodiff/random.hpp"
#include "purlab/autodiff/tensor.hpp"
#include "purlab/models/image.hpp"

namespace purlab::testing {

inline Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0,
                            bool requires_grad = false) {
  Rng rng(seed);
  std::vector<double> v(numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

inline Image random_image(std::uint64_t seed, double amplitude = 0.8) {
  Rng rng(seed);
  Image img;
  for (double& p : img.pixels()) p = rng.uniform(-amplitude, amplitude);
  return img;
}

// Smooth image with structure at several frequencies, closer to the data
// than white noise.
inline Image smooth_image(std::uint64_t seed) {
  Rng rng(seed);
  const double fx = rng.uniform(0.1, 0.5), fy = rng.uniform(0.1, 0.5), ph = rng.uniform(0.0, 6.0);
  Image img;
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        img.at(c, y, x) = 0.6 * std::sin(fx * x + fy * y + ph + c) * std::cos(0.07 * x * y / 8.0);
      }
    }
  }
  return img;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("purlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace purlab::testing
