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

#include "purlab/autodiff/optimizer.hpp"

#include <cmath>
#include <string>

namespace purlab {

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd" || name == "pgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate >= 0.0)) {
    throw std::invalid_argument("learning rate must be non-negative");
  }
}

void Optimizer::step(std::vector<Tensor>& params) {
  for (const Tensor& p : params) {
    if (!p.has_grad()) throw ShapeError("optimizer step: parameter without gradient");
  }
  if (config_.kind == OptimizerKind::kAdam && m_.empty()) {
    for (const Tensor& p : params) {
      m_.emplace_back(p.numel(), 0.0);
      v_.emplace_back(p.numel(), 0.0);
    }
  }
  if (config_.kind == OptimizerKind::kAdam && m_.size() != params.size()) {
    throw ShapeError("optimizer step: parameter list changed between steps");
  }
  ++step_count_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::kSgd) {
    for (Tensor& p : params) {
      auto g = p.grad();
      auto w = p.mutable_data();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
    }
    return;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto g = params[k].grad();
    auto w = params[k].mutable_data();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.eps);
    }
  }
}

void Optimizer::zero_grad(std::vector<Tensor>& params) const {
  for (Tensor& p : params) p.zero_grad();
}

}  // namespace purlab
