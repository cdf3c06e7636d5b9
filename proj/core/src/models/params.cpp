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

#include "purlab/models/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace purlab {

namespace {

constexpr char kMagic[] = "PURLAB1";
constexpr std::size_t kMagicLen = 7;

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; add byte swapping for this target");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_le(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

ParamSet::ParamSet(const ParamSet& other) {
  entries_.reserve(other.entries_.size());
  for (const auto& e : other.entries_) {
    entries_.push_back({e.name, e.tensor.clone(e.trainable), e.trainable});
  }
}

ParamSet& ParamSet::operator=(const ParamSet& other) {
  if (this != &other) *this = ParamSet(other);
  return *this;
}

Tensor ParamSet::add_kaiming(const std::string& name, Shape shape, std::size_t fan_in, Rng& rng,
                             double gain) {
  const double bound = gain * std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<double> v(numel(shape));
  for (double& x : v) x = rng.uniform(-bound, bound);
  Tensor t = Tensor::from(std::move(shape), std::move(v), true);
  entries_.push_back({name, t, true});
  return t;
}

Tensor ParamSet::add_zeros(const std::string& name, Shape shape) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  entries_.push_back({name, t, true});
  return t;
}

Tensor ParamSet::add_buffer(const std::string& name, Tensor value) {
  if (!name.starts_with(kBufferPrefix)) {
    throw std::invalid_argument("buffer names must start with '" + std::string(kBufferPrefix) + "'");
  }
  Tensor t = value.clone(false);
  entries_.push_back({name, t, false});
  return t;
}

const Tensor& ParamSet::get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.tensor;
  }
  throw std::out_of_range("no parameter named '" + name + "'");
}

bool ParamSet::contains(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

std::vector<Tensor> ParamSet::trainable() const {
  std::vector<Tensor> out;
  for (const auto& e : entries_) {
    if (e.trainable) out.push_back(e.tensor);
  }
  return out;
}

std::size_t ParamSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.trainable ? e.tensor.numel() : 0;
  return n;
}

void ParamSet::set_frozen(bool frozen) {
  for (auto& e : entries_) {
    if (e.trainable) e.tensor.set_requires_grad(!frozen);
  }
}

void ParamSet::set_buffer(const std::string& name, double value) {
  for (auto& e : entries_) {
    if (e.name == name) {
      for (double& v : e.tensor.mutable_data()) v = value;
      return;
    }
  }
  throw std::out_of_range("no buffer named '" + name + "'");
}

void ParamSet::load_values(const ParamSet& other) {
  if (other.entries_.size() != entries_.size()) {
    throw ShapeError("parameter set layouts differ (" + std::to_string(other.entries_.size()) +
                     " vs " + std::to_string(entries_.size()) + " tensors)");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& src = other.entries_[i];
    auto& dst = entries_[i];
    if (src.name != dst.name || src.tensor.shape() != dst.tensor.shape()) {
      throw ShapeError("parameter '" + dst.name + "' " + shape_str(dst.tensor.shape()) +
                       " does not match '" + src.name + "' " + shape_str(src.tensor.shape()));
    }
    auto from = src.tensor.data();
    std::copy(from.begin(), from.end(), dst.tensor.mutable_data().begin());
  }
}

bool ParamSet::values_equal(const ParamSet& other) const {
  if (other.entries_.size() != entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto a = entries_[i].tensor.data();
    auto b = other.entries_[i].tensor.data();
    if (entries_[i].name != other.entries_[i].name || a.size() != b.size() ||
        std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

// Layout: "PURLAB1", then per tensor: u32 name length, name bytes, u32 rank,
// rank x u64 dims, numel x f64 values. All integers and reals little-endian.
// Buffers are recognized on load by the "meta." name prefix.
void ParamSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, kMagicLen);
  for (const auto& e : entries_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.tensor.rank()));
    for (std::size_t d : e.tensor.shape()) put<std::uint64_t>(out, d);
    auto v = e.tensor.data();
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ParamSet ParamSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
  char magic[kMagicLen];
  if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw std::runtime_error("'" + path.string() + "' is not a PURLAB1 model file");
  }
  ParamSet set;
  std::uint32_t name_len = 0;
  while (read_le(in, name_len)) {
    std::string name(name_len, '\0');
    std::uint32_t rank = 0;
    if (!in.read(name.data(), name_len) || !read_le(in, rank) || rank > 8) {
      throw std::runtime_error("truncated tensor header in '" + path.string() + "'");
    }
    Shape shape(rank);
    for (auto& d : shape) {
      std::uint64_t v = 0;
      if (!read_le(in, v)) throw std::runtime_error("truncated shape in '" + path.string() + "'");
      d = static_cast<std::size_t>(v);
    }
    std::vector<double> values(numel(shape));
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double)))) {
      throw std::runtime_error("truncated values for '" + name + "' in '" + path.string() + "'");
    }
    const bool trainable = !name.starts_with(kBufferPrefix);
    Tensor t = Tensor::from(std::move(shape), std::move(values), trainable);
    set.entries_.push_back({std::move(name), t, trainable});
  }
  return set;
}

}  // namespace purlab
