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

#include "purlab/data/styles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "purlab/data/image_io.hpp"

namespace purlab {

namespace {

using Rgb = std::array<double, 3>;

struct Palette {
  Rgb low, high;
};

constexpr std::array<Palette, kMaxStyles> kPalettes{{
    {{-0.6, -0.4, 0.3}, {0.7, 0.5, -0.3}},   // stripes: navy to gold
    {{0.4, -0.6, -0.5}, {0.8, 0.7, 0.5}},    // checkerboard: brick to cream
    {{-0.6, 0.3, 0.2}, {0.6, -0.3, 0.6}},    // radial: teal to magenta
    {{-0.3, 0.2, -0.5}, {0.2, 0.6, 0.8}},    // blob: forest to sky
}};

constexpr std::size_t kBlobCount = 6;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Blob {
  double x, y, sigma, sign;
};

std::array<Blob, kBlobCount> make_blobs(const StyleGeometry& g) {
  Rng rng(g.blob_seed);
  std::array<Blob, kBlobCount> blobs{};
  for (std::size_t i = 0; i < kBlobCount; ++i) {
    blobs[i].x = rng.uniform(0.0, static_cast<double>(kImageSize));
    blobs[i].y = rng.uniform(0.0, static_cast<double>(kImageSize));
    blobs[i].sigma = g.period * rng.uniform(0.35, 0.6);
    blobs[i].sign = i % 2 == 0 ? 1.0 : -1.0;
  }
  return blobs;
}

}  // namespace

const std::array<std::string_view, kMaxStyles>& style_names() {
  static constexpr std::array<std::string_view, kMaxStyles> names{"stripes", "checkerboard", "radial",
                                                                  "blob"};
  return names;
}

std::size_t parse_style(std::string_view name) {
  const auto& names = style_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw std::invalid_argument("unknown style '" + std::string(name) + "'");
}

Image render_style(std::size_t style, const StyleGeometry& g) {
  if (style >= kMaxStyles) throw std::invalid_argument("unknown style id " + std::to_string(style));
  if (!(g.period > 0.0)) throw std::invalid_argument("style period must be positive");
  const double c = std::cos(g.orientation), s = std::sin(g.orientation);
  const Palette& pal = kPalettes[style];
  std::array<Blob, kBlobCount> blobs{};
  if (style == 3) blobs = make_blobs(g);

  Image img;
  for (std::size_t y = 0; y < kImageSize; ++y) {
    for (std::size_t x = 0; x < kImageSize; ++x) {
      const double px = static_cast<double>(x) + 0.5 - g.center_x;
      const double py = static_cast<double>(y) + 0.5 - g.center_y;
      const double u = px * c + py * s;
      const double v = -px * s + py * c;
      double p = 0.0;
      switch (style) {
        case 0:
          p = 0.5 + 0.5 * std::sin(kTwoPi * u / g.period + g.phase);
          break;
        case 1:
          p = 0.5 + 0.5 * std::tanh(2.5 * std::sin(kTwoPi * u / g.period + g.phase) *
                                    std::sin(kTwoPi * v / g.period + g.phase));
          break;
        case 2:
          p = 0.5 + 0.5 * std::sin(kTwoPi * std::hypot(px, py) / g.period + g.phase);
          break;
        default: {
          double field = 0.0;
          for (const Blob& b : blobs) {
            const double dx = static_cast<double>(x) + 0.5 - b.x;
            const double dy = static_cast<double>(y) + 0.5 - b.y;
            field += b.sign * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
          }
          p = 0.5 + 0.5 * std::tanh(2.0 * field);
        }
      }
      for (std::size_t ch = 0; ch < kImageChannels; ++ch) {
        const double v0 = pal.low[ch] + p * (pal.high[ch] - pal.low[ch]) + g.tone;
        img.at(ch, y, x) = std::clamp(v0, -0.95, 0.95);
      }
    }
  }
  return img;
}

Image style_transfer_proxy(const StyledImage& x, std::size_t target_style) {
  if (target_style >= kMaxStyles) {
    throw std::invalid_argument("unknown target style id " + std::to_string(target_style));
  }
  if (target_style == x.style) return x.image;
  return render_style(target_style, x.geometry);
}

StyleGeometry sample_geometry(const StyleDatasetSpec& spec, Rng& rng) {
  StyleGeometry g;
  g.orientation = rng.uniform(0.0, std::numbers::pi);
  g.period = rng.uniform(spec.min_period, spec.max_period);
  g.phase = rng.uniform(0.0, kTwoPi);
  g.center_x = rng.uniform(8.0, 24.0);
  g.center_y = rng.uniform(8.0, 24.0);
  g.tone = rng.uniform(-spec.max_tone, spec.max_tone);
  g.blob_seed = mix_seed(spec.seed, rng.uniform_index(std::size_t{1} << 62));
  return g;
}

std::vector<StyledImage> generate_style_dataset(const StyleDatasetSpec& spec) {
  if (spec.num_styles < 2 || spec.num_styles > kMaxStyles) {
    throw std::invalid_argument("style dataset needs between 2 and " + std::to_string(kMaxStyles) +
                                " styles, got " + std::to_string(spec.num_styles));
  }
  if (spec.images_per_style == 0) throw std::invalid_argument("style dataset needs images per style");
  if (!(spec.min_period > 0.0 && spec.min_period <= spec.max_period)) {
    throw std::invalid_argument("style period range is invalid");
  }
  const Rng root = Rng(spec.seed).substream("styles");
  std::vector<StyledImage> out;
  const std::size_t n = spec.num_styles * spec.images_per_style;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = root.substream(static_cast<std::uint64_t>(i));
    StyledImage s;
    s.style = i % spec.num_styles;
    s.geometry = sample_geometry(spec, rng);
    s.image = render_style(s.style, s.geometry);
    out.push_back(std::move(s));
  }
  return out;
}

void save_dataset(const std::vector<StyledImage>& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  nlohmann::json labels;
  labels["styles"] = style_names();
  labels["images"] = nlohmann::json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::ostringstream name;
    name << "images/" << std::setw(5) << std::setfill('0') << i << ".png";
    write_png(data[i].image, dir / name.str(), 16);
    const StyleGeometry& g = data[i].geometry;
    labels["images"].push_back({{"file", name.str()},
                                {"style", data[i].style},
                                {"geometry",
                                 {{"orientation", g.orientation},
                                  {"period", g.period},
                                  {"phase", g.phase},
                                  {"center_x", g.center_x},
                                  {"center_y", g.center_y},
                                  {"tone", g.tone},
                                  {"blob_seed", g.blob_seed}}}});
  }
  std::ofstream out(dir / "labels.json");
  if (!out) throw std::runtime_error("cannot write labels to '" + dir.string() + "'");
  out << labels.dump(1) << '\n';
}

std::vector<StyledImage> load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "labels.json");
  if (!in) throw std::runtime_error("no labels.json in dataset directory '" + dir.string() + "'");
  const auto labels = nlohmann::json::parse(in);
  std::vector<StyledImage> out;
  for (const auto& rec : labels.at("images")) {
    StyledImage s;
    s.style = rec.at("style").get<std::size_t>();
    const auto& g = rec.at("geometry");
    s.geometry.orientation = g.at("orientation").get<double>();
    s.geometry.period = g.at("period").get<double>();
    s.geometry.phase = g.at("phase").get<double>();
    s.geometry.center_x = g.at("center_x").get<double>();
    s.geometry.center_y = g.at("center_y").get<double>();
    s.geometry.tone = g.at("tone").get<double>();
    s.geometry.blob_seed = g.at("blob_seed").get<std::uint64_t>();
    s.image = read_png(dir / rec.at("file").get<std::string>());
    s.image.validate();
    out.push_back(std::move(s));
  }
  if (out.empty()) throw std::runtime_error("dataset '" + dir.string() + "' is empty");
  return out;
}

std::vector<Image> images_of(const std::vector<StyledImage>& data) {
  std::vector<Image> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(s.image);
  return out;
}

std::vector<std::size_t> labels_of(const std::vector<StyledImage>& data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(s.style);
  return out;
}

}  // namespace purlab
