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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "purlab/autodiff/random.hpp"
#include "purlab/autodiff/tensor.hpp"

namespace purlab {

/// Non-trainable tensors (scales, schedule lengths) carry this name prefix.
inline constexpr std::string_view kBufferPrefix = "meta.";

struct NamedTensor {
  std::string name;
  Tensor tensor;
  bool trainable = true;
};

/// Ordered, named parameter collection. Copies are deep: copying a ParamSet
/// (or a model holding one) never aliases the source's storage.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(const ParamSet& other);
  ParamSet& operator=(const ParamSet& other);
  ParamSet(ParamSet&&) noexcept = default;
  ParamSet& operator=(ParamSet&&) noexcept = default;

  /// Registers a tensor initialized U(-b, b) with b = sqrt(6 / fan_in).
  Tensor add_kaiming(const std::string& name, Shape shape, std::size_t fan_in, Rng& rng,
                     double gain = 1.0);
  Tensor add_zeros(const std::string& name, Shape shape);
  Tensor add_buffer(const std::string& name, Tensor value);

  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<NamedTensor>& entries() const { return entries_; }
  std::vector<Tensor> trainable() const;
  std::size_t parameter_count() const;

  /// Toggles requires_grad on every trainable tensor. Frozen sets skip
  /// weight adjoints when only input gradients are needed.
  void set_frozen(bool frozen);

  void set_buffer(const std::string& name, double value);
  /// Copies values from a set with the same names and shapes.
  void load_values(const ParamSet& other);
  bool values_equal(const ParamSet& other) const;

  void save(const std::filesystem::path& path) const;
  static ParamSet load(const std::filesystem::path& path);

 private:
  std::vector<NamedTensor> entries_;
};

}  // namespace purlab
