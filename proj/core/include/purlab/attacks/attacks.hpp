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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "purlab/autodiff/optimizer.hpp"
#include "purlab/data/styles.hpp"
#include "purlab/diffusion/diffusion.hpp"
#include "purlab/models/image.hpp"
#include "purlab/models/networks.hpp"

namespace purlab {

enum class BudgetKind { kLinf, kL2, kLpips };
BudgetKind parse_budget_kind(std::string_view name);
std::string_view to_string(BudgetKind kind);

/// Which gradient O-PGD keeps intact; the other is projected onto its
/// orthogonal complement. kNone sums the objectives as usual.
enum class OrthoPrimary { kNone, kProtection, kConsistency };
OrthoPrimary parse_ortho_primary(std::string_view name);

struct AttackConfig {
  BudgetKind budget_kind = BudgetKind::kLinf;
  double budget = 0.06;
  std::size_t steps = 200;
  double learning_rate = 0.01;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double lpips_weight = 30.0;    // lambda
  double adaptive_weight = 0.0;  // beta
  std::optional<Image> target;
  std::optional<std::size_t> target_style;
  std::size_t truncation = 5;
  double strength = kDefaultStrength;
  OrthoPrimary ortho = OrthoPrimary::kNone;
  std::uint64_t seed = 0;

  void validate() const;
  static AttackConfig encoder_defaults();
  static AttackConfig diffusion_defaults();
  static AttackConfig glaze_defaults();
  static AttackConfig adaptive_defaults();
};

struct AttackStep {
  double loss = 0.0;         // total objective before the update
  double protection = 0.0;   // embedding or output distance term
  double lpips = 0.0;        // LPIPS(x, x + delta), glaze variants only
  double consistency = 0.0;  // ||x+d - D(E(x+d))||^2, adaptive only
  /// Constraint state after the update: L-inf or L2 norm of delta for
  /// ball budgets, LPIPS for the hinge budget.
  double delta_norm = 0.0;
  /// Largest amount by which a pixel left [-1, 1] after the update.
  double range_violation = 0.0;
};

struct AttackResult {
  Image protected_image;
  std::vector<AttackStep> curve;
  /// Objective evaluated at the returned image.
  double final_loss = 0.0;
};

/// CSV with header step,loss,protection,lpips,consistency,delta_norm,range_violation.
std::string attack_curve_csv(const std::vector<AttackStep>& curve);

/// Gray image, the default target for the encoder and diffusion attacks.
Image gray_target();

/// argmin ||E(x+d) - E(x_target)||^2 s.t. ||d||_inf <= budget.
AttackResult encoder_attack(const Autoencoder& ae, const Image& x, const AttackConfig& config);

/// argmin ||f_LDM(x+d) - x_target||^2 s.t. ||d||_2 <= budget, with the
/// last `truncation` sampler steps differentiated and a fixed noising draw.
AttackResult diffusion_attack(const LatentDiffusion& ldm, const Image& x, const AttackConfig& config);

/// ||E(style_target) - E(x+d)||^2 + lambda max(LPIPS(x, x+d) - budget, 0),
/// plus beta ||x+d - D(E(x+d))||^2 when adaptive_weight > 0.
AttackResult glaze_protect(const Autoencoder& ae, const FeatureNet& lpips_net, const Image& x,
                           const Image& style_target, const AttackConfig& config);
/// Uses style_transfer_proxy(x, target_style); rejects target == source.
AttackResult glaze_protect(const Autoencoder& ae, const FeatureNet& lpips_net, const StyledImage& x,
                           const AttackConfig& config);
AttackResult adaptive_glaze_protect(const Autoencoder& ae, const FeatureNet& lpips_net,
                                    const StyledImage& x, const AttackConfig& config);

struct OrthoStep {
  std::vector<double> direction;
  bool primary_zero = false;
};

/// g1 + (g2 - (g2 . g1_hat) g1_hat). A zero primary returns g2 with the flag.
OrthoStep orthogonal_step(const std::vector<double>& primary, const std::vector<double>& secondary);

}  // namespace purlab
