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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "purlab/autodiff/random.hpp"
#include "purlab/models/image.hpp"

namespace purlab {

inline constexpr std::size_t kMaxStyles = 4;

/// Style names in class-id order.
const std::array<std::string_view, kMaxStyles>& style_names();
std::size_t parse_style(std::string_view name);

/// Content coordinates shared by every style renderer. Rendering the same
/// geometry with another style keeps the layout and swaps the texture family.
struct StyleGeometry {
  double orientation = 0.0;  // radians
  double period = 12.0;      // pixels
  double phase = 0.0;        // radians
  double center_x = 16.0;
  double center_y = 16.0;
  double tone = 0.0;         // brightness offset shared by all palettes
  std::uint64_t blob_seed = 0;

  bool operator==(const StyleGeometry&) const = default;
};

struct StyledImage {
  Image image;
  std::size_t style = 0;
  StyleGeometry geometry;
};

Image render_style(std::size_t style, const StyleGeometry& geometry);

/// Omega(x, target): the content of x re-rendered in the target style.
Image style_transfer_proxy(const StyledImage& x, std::size_t target_style);

struct StyleDatasetSpec {
  std::size_t num_styles = kMaxStyles;
  std::size_t images_per_style = 512;
  double min_period = 8.0;
  double max_period = 16.0;
  double max_tone = 0.1;
  std::uint64_t seed = 0;
};

StyleGeometry sample_geometry(const StyleDatasetSpec& spec, Rng& rng);

/// Deterministic per seed; images are ordered by index, labels cycle
/// through the styles.
std::vector<StyledImage> generate_style_dataset(const StyleDatasetSpec& spec);

void save_dataset(const std::vector<StyledImage>& data, const std::filesystem::path& dir);
std::vector<StyledImage> load_dataset(const std::filesystem::path& dir);

std::vector<Image> images_of(const std::vector<StyledImage>& data);
std::vector<std::size_t> labels_of(const std::vector<StyledImage>& data);

}  // namespace purlab
