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

#include "purlab/models/image.hpp"

#include <algorithm>
#include <cmath>

namespace purlab {

Image::Image(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : channels_(channels), height_(height), width_(width), pixels_(channels * height * width, fill) {}

Image::Image(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> pixels)
    : channels_(channels), height_(height), width_(width), pixels_(std::move(pixels)) {
  if (pixels_.size() != channels * height * width) {
    throw ShapeError("image pixel count does not match " + shape_str({channels, height, width}));
  }
}

Image Image::from_tensor(const Tensor& t) {
  if (t.rank() != 3) throw ShapeError("image tensor must be (C,H,W), got " + shape_str(t.shape()));
  return Image(t.dim(0), t.dim(1), t.dim(2), std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor Image::to_tensor(bool requires_grad) const {
  return Tensor::from({channels_, height_, width_}, pixels_, requires_grad);
}

bool Image::in_range(double lo, double hi) const {
  return std::all_of(pixels_.begin(), pixels_.end(), [&](double v) { return v >= lo && v <= hi; });
}

void Image::validate() const {
  if (channels_ != kImageChannels || height_ != kImageSize || width_ != kImageSize) {
    throw ShapeError("expected a 3x32x32 image, got " + shape_str({channels_, height_, width_}));
  }
  if (!in_range()) throw ShapeError("image values must lie in [-1, 1]");
}

Image Image::clipped() const {
  Image out = *this;
  for (double& v : out.pixels_) v = std::clamp(v, -1.0, 1.0);
  return out;
}

double max_abs_diff(const Image& a, const Image& b) {
  if (a.size() != b.size()) throw ShapeError("max_abs_diff: image sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

}  // namespace purlab
