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

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "purlab/autodiff/tensor.hpp"

namespace purlab {

/// Seeded random stream. Sub-streams are derived from the seed and a label,
/// never from the parent's consumed state, so the same label always yields
/// the same sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  Rng substream(std::string_view label) const;
  Rng substream(std::uint64_t index) const;

  double uniform();                  // [0, 1)
  double uniform(double lo, double hi);
  std::size_t uniform_index(std::size_t n);  // [0, n)
  double normal();
  std::vector<double> normals(std::size_t n, double stddev = 1.0);
  Tensor normal_tensor(Shape shape, double stddev = 1.0);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_label(std::string_view label);

}  // namespace purlab
