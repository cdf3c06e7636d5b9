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
#include <vector>

#include "purlab/models/image.hpp"

namespace purlab {

/// Reads any PNG (gray, RGB, palette, alpha, 8 or 16 bit) as RGB in [-1, 1].
/// The result keeps the file's resolution.
Image read_png(const std::filesystem::path& path);

/// Writes RGB with 8 or 16 bits per channel; values are clipped to [-1, 1].
void write_png(const Image& image, const std::filesystem::path& path, int bit_depth = 16);

/// Center crop to a square, then bilinear resize.
Image center_crop_resize(const Image& image, std::size_t size = kImageSize);
/// Bilinear resize with half-pixel sampling and edge clamping.
Image resize_bilinear(const Image& image, std::size_t height, std::size_t width);

struct IngestedImage {
  std::string name;
  Image image;
};

/// Every decodable *.png directly under `dir` (sorted by file name), cropped
/// and resized to 32x32. Undecodable files are skipped with a warning on
/// stderr; files with other extensions are ignored.
std::vector<IngestedImage> ingest_images(const std::filesystem::path& dir);

}  // namespace purlab
