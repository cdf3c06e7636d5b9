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
#include <vector>

#include "purlab/autodiff/tensor.hpp"

namespace purlab {

inline constexpr std::size_t kImageChannels = 3;
inline constexpr std::size_t kImageSize = 32;
inline constexpr std::size_t kLatentChannels = 4;
inline constexpr std::size_t kLatentSize = 8;

/// Planar (C,H,W) pixel grid with values in [-1, 1].
class Image {
 public:
  Image() : Image(kImageChannels, kImageSize, kImageSize) {}
  Image(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  Image(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> pixels);

  static Image from_tensor(const Tensor& t);
  Tensor to_tensor(bool requires_grad = false) const;

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return pixels_[(c * height_ + y) * width_ + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return pixels_[(c * height_ + y) * width_ + x];
  }
  std::vector<double>& pixels() { return pixels_; }
  const std::vector<double>& pixels() const { return pixels_; }

  bool in_range(double lo = -1.0, double hi = 1.0) const;
  /// Rejects images whose shape is not 3x32x32 or whose values leave [-1,1].
  void validate() const;
  Image clipped() const;

  bool operator==(const Image& other) const = default;

 private:
  std::size_t channels_, height_, width_;
  std::vector<double> pixels_;
};

double max_abs_diff(const Image& a, const Image& b);

}  // namespace purlab
