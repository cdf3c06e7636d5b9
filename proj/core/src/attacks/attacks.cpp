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

#include "purlab/attacks/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

#include "purlab/autodiff/ops.hpp"
#include "purlab/metrics/metrics.hpp"

namespace purlab {

BudgetKind parse_budget_kind(std::string_view name) {
  if (name == "linf") return BudgetKind::kLinf;
  if (name == "l2") return BudgetKind::kL2;
  if (name == "lpips") return BudgetKind::kLpips;
  throw std::invalid_argument("unknown budget kind '" + std::string(name) + "'");
}

std::string_view to_string(BudgetKind kind) {
  switch (kind) {
    case BudgetKind::kLinf:
      return "linf";
    case BudgetKind::kL2:
      return "l2";
    default:
      return "lpips";
  }
}

OrthoPrimary parse_ortho_primary(std::string_view name) {
  if (name == "none") return OrthoPrimary::kNone;
  if (name == "protection") return OrthoPrimary::kProtection;
  if (name == "consistency") return OrthoPrimary::kConsistency;
  throw std::invalid_argument("unknown O-PGD primary objective '" + std::string(name) + "'");
}

std::string attack_curve_csv(const std::vector<AttackStep>& curve) {
  std::string out = "step,loss,protection,lpips,consistency,delta_norm,range_violation\n";
  char line[256];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& s = curve[i];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, s.loss, s.protection, s.lpips,
                  s.consistency, s.delta_norm, s.range_violation);
    out += line;
  }
  return out;
}

Image gray_target() { return Image(kImageChannels, kImageSize, kImageSize, 0.0); }

void AttackConfig::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw std::invalid_argument("attack budget must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("attack learning rate must be positive");
  if (!(lpips_weight >= 0.0)) throw std::invalid_argument("LPIPS weight must be >= 0");
  if (!(adaptive_weight >= 0.0)) throw std::invalid_argument("adaptive weight must be >= 0");
}

AttackConfig AttackConfig::encoder_defaults() {
  AttackConfig c;
  c.target = gray_target();
  return c;
}

AttackConfig AttackConfig::diffusion_defaults() {
  AttackConfig c;
  c.budget_kind = BudgetKind::kL2;
  c.budget = 3.0;
  c.steps = 100;
  c.learning_rate = 0.1;
  c.truncation = 5;
  c.target = gray_target();
  return c;
}

AttackConfig AttackConfig::glaze_defaults() {
  AttackConfig c;
  c.budget_kind = BudgetKind::kLpips;
  c.budget = 0.05;
  c.steps = 500;
  c.learning_rate = 1e-2;
  c.optimizer = OptimizerKind::kAdam;
  c.lpips_weight = 30.0;
  return c;
}

AttackConfig AttackConfig::adaptive_defaults() {
  AttackConfig c = glaze_defaults();
  c.adaptive_weight = 40.0;
  return c;
}

OrthoStep orthogonal_step(const std::vector<double>& primary, const std::vector<double>& secondary) {
  if (primary.size() != secondary.size()) {
    throw ShapeError("orthogonal_step: gradient sizes " + std::to_string(primary.size()) + " and " +
                     std::to_string(secondary.size()) + " differ");
  }
  double n2 = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < primary.size(); ++i) {
    n2 += primary[i] * primary[i];
    dot += primary[i] * secondary[i];
  }
  if (n2 == 0.0) return {secondary, true};
  const double c = dot / n2;
  OrthoStep out;
  out.direction.resize(primary.size());
  for (std::size_t i = 0; i < primary.size(); ++i) {
    out.direction[i] = primary[i] + (secondary[i] - c * primary[i]);
  }
  return out;
}

namespace {

struct Objective {
  Tensor loss;
  double protection = 0.0, lpips = 0.0, consistency = 0.0;
  // When set, the step direction comes from these two separately.
  Tensor primary, secondary;
};

using ObjectiveFn = std::function<Objective(const Tensor& p)>;

double l2_distance(const std::vector<double>& p, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - x[i]) * (p[i] - x[i]);
  return std::sqrt(s);
}

double linf_distance(const std::vector<double>& p, const std::vector<double>& x) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::abs(p[i] - x[i]));
  return m;
}

// Projects p onto the budget ball around x intersected with [-1, 1]. The
// check is evaluated in the same floating-point expression the tests use,
// so the returned point satisfies it exactly.
void project(std::vector<double>& p, const std::vector<double>& x, BudgetKind kind, double budget) {
  for (double& v : p) v = std::clamp(v, -1.0, 1.0);
  if (kind == BudgetKind::kLinf) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::clamp(p[i], std::max(-1.0, x[i] - budget), std::min(1.0, x[i] + budget));
      while (std::abs(p[i] - x[i]) > budget) p[i] = std::nextafter(p[i], x[i]);
    }
  } else if (kind == BudgetKind::kL2) {
    double n = l2_distance(p, x);
    double shrink = 1.0;
    while (n > budget) {
      const double f = budget / n * shrink;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(x[i] + (p[i] - x[i]) * f, -1.0, 1.0);
      n = l2_distance(p, x);
      shrink *= 1.0 - 1e-12;
    }
  }
}

double range_violation(const std::vector<double>& p) {
  double v = 0.0;
  for (double x : p) v = std::max({v, x - 1.0, -1.0 - x});
  return v;
}

AttackResult run_attack(const Image& x, const AttackConfig& config, const ObjectiveFn& objective,
                        const std::function<double(const std::vector<double>&)>& lpips_of) {
  config.validate();
  x.validate();
  const Shape shape{x.channels(), x.height(), x.width()};
  const std::vector<double>& xv = x.pixels();
  std::vector<double> p = xv;
  OptimizerConfig oc;
  oc.kind = config.optimizer;
  oc.learning_rate = config.learning_rate;
  Optimizer opt(oc);

  AttackResult result;
  result.curve.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::vector<Tensor> params{Tensor::from(shape, p, true)};
    Objective obj = objective(params[0]);
    AttackStep rec;
    rec.loss = obj.loss.item();
    rec.protection = obj.protection;
    rec.lpips = obj.lpips;
    rec.consistency = obj.consistency;
    if (!std::isfinite(rec.loss)) throw std::runtime_error("attack loss is not finite at step " + std::to_string(step));

    std::vector<double> g;
    if (obj.primary.defined()) {
      obj.primary.backward();
      const std::vector<double> g1(params[0].grad().begin(), params[0].grad().end());
      params[0].zero_grad();
      obj.secondary.backward();
      const std::vector<double> g2(params[0].grad().begin(), params[0].grad().end());
      g = orthogonal_step(g1, g2).direction;
    } else {
      obj.loss.backward();
      g.assign(params[0].grad().begin(), params[0].grad().end());
    }
    if (config.optimizer == OptimizerKind::kSgd) {
      // PGD steps: sign for L-inf, unit L2 direction for L2 balls.
      if (config.budget_kind == BudgetKind::kLinf) {
        for (double& v : g) v = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      } else if (config.budget_kind == BudgetKind::kL2) {
        double n = 0.0;
        for (double v : g) n += v * v;
        n = std::sqrt(n);
        if (n > 0.0) {
          for (double& v : g) v /= n;
        }
      }
    }
    params[0].set_grad(g);
    opt.step(params);
    p.assign(params[0].data().begin(), params[0].data().end());
    project(p, xv, config.budget_kind, config.budget);

    switch (config.budget_kind) {
      case BudgetKind::kLinf:
        rec.delta_norm = linf_distance(p, xv);
        break;
      case BudgetKind::kL2:
        rec.delta_norm = l2_distance(p, xv);
        break;
      default:
        rec.delta_norm = lpips_of(p);
    }
    rec.range_violation = range_violation(p);
    result.curve.push_back(rec);
  }
  {
    NoGradGuard no_grad;
    result.final_loss = objective(Tensor::from(shape, p)).loss.item();
  }
  result.protected_image = Image(x.channels(), x.height(), x.width(), std::move(p));
  return result;
}

Tensor encode_const(const Autoencoder& ae, const Image& img) {
  NoGradGuard no_grad;
  return ae.encode(img.to_tensor());
}

}  // namespace

AttackResult encoder_attack(const Autoencoder& ae, const Image& x, const AttackConfig& config) {
  if (!config.target) throw std::invalid_argument("encoder attack needs a target image");
  if (config.budget_kind != BudgetKind::kLinf) throw std::invalid_argument("encoder attack uses an L-inf budget");
  const Tensor z_target = encode_const(ae, *config.target);
  Autoencoder frozen = ae;
  frozen.params().set_frozen(true);
  return run_attack(
      x, config,
      [&](const Tensor& p) {
        Objective o;
        o.loss = ops::mse(frozen.encode(p), z_target);
        o.protection = o.loss.item();
        return o;
      },
      nullptr);
}

AttackResult diffusion_attack(const LatentDiffusion& ldm, const Image& x, const AttackConfig& config) {
  if (!config.target) throw std::invalid_argument("diffusion attack needs a target image");
  if (config.budget_kind != BudgetKind::kL2) throw std::invalid_argument("diffusion attack uses an L2 budget");
  const SamplerConfig sc = ldm.sampler_for(config.strength);
  const std::size_t n = sampler_timesteps(sc.start_t, sc.steps).size() - 1;
  if (config.truncation == 0 || config.truncation > n) {
    throw std::invalid_argument("truncation " + std::to_string(config.truncation) + " must lie in [1, " +
                                std::to_string(n) + "] sampler steps");
  }
  Autoencoder ae = ldm.autoencoder;
  Denoiser den = ldm.denoiser;
  ae.params().set_frozen(true);
  den.params().set_frozen(true);
  const LatentDiffusion frozen{ae, den, ldm.schedule, ldm.sampler_steps};
  const Tensor eps = latent_noise(config.seed);
  const Tensor target = config.target->to_tensor();
  return run_attack(
      x, config,
      [&](const Tensor& p) {
        Objective o;
        o.loss = ops::mse(reconstruct_ldm(frozen, p, config.strength, eps, config.truncation), target);
        o.protection = o.loss.item();
        return o;
      },
      nullptr);
}

AttackResult glaze_protect(const Autoencoder& ae, const FeatureNet& lpips_net, const Image& x,
                           const Image& style_target, const AttackConfig& config) {
  if (config.budget_kind != BudgetKind::kLpips) throw std::invalid_argument("glaze uses an LPIPS budget");
  style_target.validate();
  const Tensor z_target = encode_const(ae, style_target);
  Autoencoder frozen = ae;
  FeatureNet net = lpips_net;
  frozen.params().set_frozen(true);
  net.params().set_frozen(true);
  const Tensor xt = x.to_tensor();
  const double beta = config.adaptive_weight;
  const bool ortho = beta > 0.0 && config.ortho != OrthoPrimary::kNone;
  return run_attack(
      x, config,
      [&](const Tensor& p) {
        Objective o;
        const Tensor z = frozen.encode(p);
        const Tensor prot = ops::mse(z, z_target);
        const Tensor lp = lpips_proxy(net, xt, p);
        Tensor glaze = ops::add(prot, ops::scale(ops::relu(ops::add_scalar(lp, -config.budget)),
                                                 config.lpips_weight));
        o.protection = prot.item();
        o.lpips = lp.item();
        if (beta > 0.0) {
          const Tensor cons = ops::mse(p, frozen.decode(z));
          o.consistency = cons.item();
          const Tensor weighted = ops::scale(cons, beta);
          o.loss = ops::add(glaze, weighted);
          if (ortho) {
            o.primary = config.ortho == OrthoPrimary::kProtection ? glaze : weighted;
            o.secondary = config.ortho == OrthoPrimary::kProtection ? weighted : glaze;
          }
        } else {
          o.loss = glaze;
        }
        return o;
      },
      [&](const std::vector<double>& pv) {
        NoGradGuard no_grad;
        return lpips_proxy(net, xt, Tensor::from(xt.shape(), pv)).item();
      });
}

AttackResult glaze_protect(const Autoencoder& ae, const FeatureNet& lpips_net, const StyledImage& x,
                           const AttackConfig& config) {
  if (!config.target_style) throw std::invalid_argument("glaze needs a target style");
  if (*config.target_style == x.style) {
    throw std::invalid_argument("glaze target style equals the source style");
  }
  return glaze_protect(ae, lpips_net, x.image, style_transfer_proxy(x, *config.target_style), config);
}

AttackResult adaptive_glaze_protect(const Autoencoder& ae, const FeatureNet& lpips_net,
                                    const StyledImage& x, const AttackConfig& config) {
  return glaze_protect(ae, lpips_net, x, config);
}

}  // namespace purlab
