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

#include "purlab/data/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <memory>
#include <stdexcept>

namespace purlab {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  return f;
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw std::runtime_error("'" + path.string() + "' is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("libpng initialization failed");
  }
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("failed to decode PNG '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
  png_read_update_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(kImageChannels, height, width);
  const double maxv = depth == 16 ? 65535.0 : 255.0;
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < kImageChannels; ++c) {
        const std::size_t i = static_cast<std::size_t>(x) * kImageChannels + c;
        double v = 0.0;
        if (depth == 16) {
          std::uint16_t w;
          std::memcpy(&w, rows[y] + 2 * i, 2);
          v = w;
        } else {
          v = rows[y][i];
        }
        img.at(c, y, x) = 2.0 * v / maxv - 1.0;
      }
    }
  }
  return img;
}

void write_png(const Image& image, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("PNG bit depth must be 8 or 16");
  if (image.channels() != kImageChannels) throw ShapeError("PNG output needs 3 channels");
  const std::size_t bytes = bit_depth / 8;
  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<png_byte> buffer(image.height() * image.width() * kImageChannels * bytes);
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      for (std::size_t c = 0; c < kImageChannels; ++c) {
        const double v = (std::clamp(image.at(c, y, x), -1.0, 1.0) + 1.0) * 0.5 * maxv;
        const auto q = static_cast<std::uint32_t>(std::lround(v));
        const std::size_t i = ((y * image.width() + x) * kImageChannels + c) * bytes;
        if (bytes == 2) {
          buffer[i] = static_cast<png_byte>(q >> 8);  // PNG stores big-endian
          buffer[i + 1] = static_cast<png_byte>(q & 0xff);
        } else {
          buffer[i] = static_cast<png_byte>(q);
        }
      }
    }
  }
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("libpng initialization failed");
  }
  std::vector<png_bytep> rows(image.height());
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("failed to encode PNG '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()),
               bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = image.width() * kImageChannels * bytes;
  for (std::size_t y = 0; y < image.height(); ++y) rows[y] = buffer.data() + y * stride;
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image resize_bilinear(const Image& image, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw std::invalid_argument("resize target must be nonempty");
  Image out(image.channels(), height, width);
  const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
  const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
  auto coord = [](double pos, std::size_t n, std::size_t& i0, std::size_t& i1, double& f) {
    const double p = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    i0 = static_cast<std::size_t>(std::floor(p));
    i1 = std::min(i0 + 1, n - 1);
    f = p - static_cast<double>(i0);
  };
  for (std::size_t y = 0; y < height; ++y) {
    std::size_t y0, y1;
    double fy;
    coord((static_cast<double>(y) + 0.5) * sy - 0.5, image.height(), y0, y1, fy);
    for (std::size_t x = 0; x < width; ++x) {
      std::size_t x0, x1;
      double fx;
      coord((static_cast<double>(x) + 0.5) * sx - 0.5, image.width(), x0, x1, fx);
      for (std::size_t c = 0; c < image.channels(); ++c) {
        const double top = image.at(c, y0, x0) * (1.0 - fx) + image.at(c, y0, x1) * fx;
        const double bot = image.at(c, y1, x0) * (1.0 - fx) + image.at(c, y1, x1) * fx;
        out.at(c, y, x) = top * (1.0 - fy) + bot * fy;
      }
    }
  }
  return out;
}

Image center_crop_resize(const Image& image, std::size_t size) {
  const std::size_t side = std::min(image.height(), image.width());
  const std::size_t oy = (image.height() - side) / 2;
  const std::size_t ox = (image.width() - side) / 2;
  Image crop(image.channels(), side, side);
  for (std::size_t c = 0; c < image.channels(); ++c) {
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) crop.at(c, y, x) = image.at(c, oy + y, ox + x);
    }
  }
  if (side == size) return crop;
  return resize_bilinear(crop, size, size);
}

std::vector<IngestedImage> ingest_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<IngestedImage> out;
  for (const auto& f : files) {
    try {
      out.push_back({f.filename().string(), center_crop_resize(read_png(f)).clipped()});
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << f.string() << ": " << e.what() << '\n';
    }
  }
  if (out.empty()) throw std::runtime_error("no PNG images found in '" + dir.string() + "'");
  return out;
}

}  // namespace purlab
