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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "purlab/harness/harness.hpp"
#include "purlab/metrics/metrics.hpp"

namespace purlab {

namespace {

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

std::string index_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu", prefix, i);
  return buf;
}

// Draws `count` distinct entries of `pool` (optionally one style only),
// in draw order.
std::vector<StyledImage> draw(const std::vector<StyledImage>& pool, std::size_t count,
                              std::optional<std::size_t> style, Rng rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!style || pool[i].style == *style) candidates.push_back(i);
  }
  if (candidates.size() < count) {
    throw ConfigError("image pool has " + std::to_string(candidates.size()) + " eligible images, " +
                      std::to_string(count) + " requested");
  }
  std::vector<StyledImage> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + rng.uniform_index(candidates.size() - k);
    std::swap(candidates[k], candidates[j]);
    out.push_back(pool[candidates[k]]);
  }
  return out;
}

MetricReport new_report(const std::string& name, const std::string& config_json, std::uint64_t seed,
                        const LabModels& models) {
  MetricReport r;
  r.name = name;
  r.config_json = config_json;
  r.provenance.seed = seed;
  r.provenance.config_hash = fnv1a_hex(config_json);
  r.provenance.model_hashes = models.model_hashes;
  return r;
}

// IMPRESS over a set, recording loss and latent-distance diagnostics.
std::vector<Image> purify_set(const LabModels& m, const std::vector<Image>& inputs, const std::vector<Image>& clean,
                              const PurifyConfig& base, std::uint64_t seed, const std::string& condition,
                              const std::vector<std::string>& ids, MetricReport& report, std::ostream* log) {
  std::vector<Image> out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    PurifyConfig pc = base;
    pc.seed = mix_seed(mix_seed(seed, hash_label(condition)), i);
    const PurifyResult res = impress_purify(m.autoencoder, m.classifier, inputs[i], pc);
    const auto dist = latent_distance_trajectory(m.autoencoder, clean[i], res.snapshots);
    report.add(ids[i], condition, "combined_first", res.trajectory.front().combined);
    report.add(ids[i], condition, "combined_last", res.trajectory.back().combined);
    report.add(ids[i], condition, "lpips_to_input", res.trajectory.back().lpips);
    report.add(ids[i], condition, "latent_distance_first", dist.front());
    report.add(ids[i], condition, "latent_distance_last", dist.back());
    out.push_back(res.purified);
    if (log && (i + 1) % 8 == 0) note(log, "  " + condition + ": purified " + std::to_string(i + 1));
  }
  return out;
}

}  // namespace

double condition_accuracy(const MetricReport& report, const std::string& condition) {
  return report.mean(condition, "victim_hit");
}

PipelineResult run_style_pipeline(const LabModels& models, const std::vector<StyledImage>& pool,
                                  const StylePipelineConfig& config, std::ostream* log) {
  if (config.victim_style == config.target_style) throw ConfigError("target style equals the victim style");
  const std::string config_json = to_json(config);
  PipelineResult result;
  MetricReport& report = result.report = new_report("style", config_json, config.seed, models);

  const auto victims = draw(pool, config.finetune_images, config.victim_style,
                            Rng(config.seed).substream("style.draw"));
  std::vector<std::string>& ids = result.image_ids;
  std::vector<Image> clean;
  for (std::size_t i = 0; i < victims.size(); ++i) {
    ids.push_back(index_id("img", i));
    clean.push_back(victims[i].image);
  }
  std::vector<std::string> order{"clean"};
  result.inputs["clean"] = clean;

  note(log, "protecting " + std::to_string(victims.size()) + " images");
  std::vector<Image> protected_images;
  for (std::size_t i = 0; i < victims.size(); ++i) {
    AttackConfig ac = config.protection;
    ac.target_style = config.target_style;
    ac.seed = mix_seed(mix_seed(config.seed, hash_label("protect")), i);
    const AttackResult r = glaze_protect(models.autoencoder, models.classifier, victims[i], ac);
    report.add(ids[i], "protected", "attack_loss_first", r.curve.empty() ? r.final_loss : r.curve.front().loss);
    report.add(ids[i], "protected", "attack_loss_last", r.final_loss);
    report.add(ids[i], "protected", "lpips_to_clean", lpips_proxy(models.classifier, clean[i], r.protected_image));
    protected_images.push_back(r.protected_image);
  }
  order.push_back("protected");
  result.inputs["protected"] = protected_images;

  for (PurifyMethod m : config.baselines) {
    const std::string name(to_string(m));
    std::vector<Image> out;
    for (std::size_t i = 0; i < protected_images.size(); ++i) {
      out.push_back(apply_baseline(m, protected_images[i], mix_seed(mix_seed(config.seed, hash_label(name)), i)));
    }
    order.push_back(name);
    result.inputs[name] = std::move(out);
  }
  if (config.include_impress) {
    note(log, "purifying protected images");
    result.inputs["impress"] =
        purify_set(models, protected_images, clean, config.purify, config.seed, "impress", ids, report, log);
    order.push_back("impress");
  }
  if (config.include_clean_impress) {
    note(log, "purifying clean images");
    result.inputs["clean_impress"] =
        purify_set(models, clean, clean, config.purify, config.seed, "clean_impress", ids, report, log);
    order.push_back("clean_impress");
  }

  const LatentDiffusion probe{models.autoencoder, models.base_denoiser, models.schedule};
  const std::uint64_t gen_seed = mix_seed(config.seed, hash_label("style.generate"));
  TrainConfig ft = config.finetune;
  ft.seed = mix_seed(config.seed, hash_label("style.finetune") ^ config.finetune.seed);
  for (const auto& cond : order) {
    const auto& imgs = result.inputs.at(cond);
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      report.add(ids[i], cond, "consistency", consistency_loss(models.autoencoder, imgs[i]));
    }
    Denoiser tuned = models.base_denoiser;
    train_denoiser(tuned, models.autoencoder, imgs, models.schedule, ft);
    const LatentDiffusion ldm{models.autoencoder, tuned, models.schedule, probe.sampler_steps};
    std::size_t hits = 0;
    for (std::size_t j = 0; j < config.generations; ++j) {
      const Image sample = generate_sample(ldm, latent_noise(mix_seed(gen_seed, j)));
      const std::size_t label = models.classifier.classify(sample).label;
      const bool hit = label == config.victim_style;
      hits += hit ? 1 : 0;
      report.add(index_id("gen", j), cond, "victim_hit", hit ? 1.0 : 0.0);
      report.add(index_id("gen", j), cond, "predicted_style", static_cast<double>(label));
    }
    note(log, "  " + cond + ": accuracy " + std::to_string(static_cast<double>(hits) / config.generations));
  }
  return result;
}

PipelineResult run_edit_pipeline(const LabModels& models, const std::vector<StyledImage>& pool,
                                 const EditPipelineConfig& config, std::ostream* log) {
  if (!config.protection.target) throw ConfigError("edit protection needs a target image");
  const std::string config_json = to_json(config);
  PipelineResult result;
  MetricReport& report = result.report = new_report("edit", config_json, config.seed, models);
  const auto picked = draw(pool, config.images, std::nullopt, Rng(config.seed).substream("edit.draw"));
  const LatentDiffusion ldm{models.autoencoder, models.full_denoiser, models.schedule};
  const EditMask mask = centered_square_mask(config.mask_fraction);

  std::vector<std::string>& ids = result.image_ids;
  std::vector<Image> clean;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    ids.push_back(index_id("img", i));
    clean.push_back(picked[i].image);
  }
  std::vector<std::string> order{"clean", "protected"};
  result.inputs["clean"] = clean;

  note(log, "protecting " + std::to_string(clean.size()) + " images (" + config.protection_method + " attack)");
  std::vector<Image> protected_images;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    AttackConfig ac = config.protection;
    ac.seed = mix_seed(mix_seed(config.seed, hash_label("protect")), i);
    const AttackResult r = config.protection_method == "encoder" ? encoder_attack(models.autoencoder, clean[i], ac)
                                                                 : diffusion_attack(ldm, clean[i], ac);
    report.add(ids[i], "protected", "attack_loss_first", r.curve.empty() ? r.final_loss : r.curve.front().loss);
    report.add(ids[i], "protected", "attack_loss_last", r.final_loss);
    protected_images.push_back(r.protected_image);
  }
  result.inputs["protected"] = protected_images;
  for (PurifyMethod m : config.baselines) {
    const std::string name(to_string(m));
    std::vector<Image> out;
    for (std::size_t i = 0; i < protected_images.size(); ++i) {
      out.push_back(apply_baseline(m, protected_images[i], mix_seed(mix_seed(config.seed, hash_label(name)), i)));
    }
    order.push_back(name);
    result.inputs[name] = std::move(out);
  }
  if (config.include_impress) {
    note(log, "purifying protected images");
    result.inputs["impress"] =
        purify_set(models, protected_images, clean, config.purify, config.seed, "impress", ids, report, log);
    order.push_back("impress");
  }

  note(log, "editing");
  const std::uint64_t edit_seed = mix_seed(config.seed, hash_label("edit.noise"));
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const Tensor eps = latent_noise(mix_seed(edit_seed, i));
    const Image reference = edit_image(ldm, clean[i], mask, config.strength, eps);
    for (const auto& cond : order) {
      const Image edited = edit_image(ldm, result.inputs.at(cond)[i], mask, config.strength, eps);
      report.add(ids[i], cond, "ssim", ssim(reference, edited));
      report.add(ids[i], cond, "psnr", psnr(reference, edited));
      report.add(ids[i], cond, "vifp", vifp(reference, edited));
    }
  }
  return result;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "alpha") return SweepParameter::kAlpha;
  if (name == "delta_L" || name == "delta_l") return SweepParameter::kDeltaL;
  if (name == "beta_adapt" || name == "beta") return SweepParameter::kBetaAdapt;
  throw ConfigError("unknown sweep parameter '" + name + "' (alpha, delta_L, beta_adapt)");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kAlpha:
      return "alpha";
    case SweepParameter::kDeltaL:
      return "delta_L";
    default:
      return "beta_adapt";
  }
}

MetricReport run_ablation_sweep(const LabModels& models, const std::vector<StyledImage>& pool,
                                const StylePipelineConfig& base, SweepParameter parameter,
                                const std::vector<double>& values, std::ostream* log) {
  if (values.empty()) throw ConfigError("sweep needs a nonempty value list");
  if (values.size() < 2) throw ConfigError("sweep needs at least two values");
  nlohmann::ordered_json cfg = nlohmann::ordered_json::parse(to_json(base));
  cfg["sweep"] = {{"parameter", to_string(parameter)}, {"values", values}};
  MetricReport sweep = new_report("sweep_" + to_string(parameter), cfg.dump(), base.seed, models);
  for (double v : values) {
    StylePipelineConfig c = base;
    switch (parameter) {
      case SweepParameter::kAlpha:
        c.purify.alpha = v;
        break;
      case SweepParameter::kDeltaL:
        c.purify.lpips_budget = v;
        break;
      case SweepParameter::kBetaAdapt:
        c.protection.adaptive_weight = v;
        break;
    }
    char label[64];
    std::snprintf(label, sizeof label, "%s=%g", to_string(parameter).c_str(), v);
    note(log, std::string("sweep point ") + label);
    const PipelineResult r = run_style_pipeline(models, pool, c, log);
    for (const auto& rec : r.report.records) {
      sweep.add(rec.image_id, std::string(label) + "/" + rec.condition, rec.metric, rec.value);
    }
    for (const auto& agg : r.report.aggregates()) {
      if (agg.metric == "victim_hit") {
        sweep.add("aggregate", std::string(label) + "/" + agg.condition, "accuracy", agg.mean);
      }
    }
  }
  return sweep;
}

std::vector<std::filesystem::path> emit_report(const std::vector<MetricReport>& reports,
                                               const std::filesystem::path& dir,
                                               const std::vector<std::string>& formats) {
  if (reports.empty()) throw ConfigError("emit_report needs at least one report");
  for (const auto& f : formats) {
    if (f != "json" && f != "csv") throw ConfigError("unknown report format '" + f + "'");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) throw std::runtime_error("cannot write '" + p.string() + "'");
    written.push_back(p);
  };
  nlohmann::ordered_json manifest;
  manifest["software_version"] = kSoftwareVersion;
  // Reproducible builds convention; falls back to wall-clock time.
  std::int64_t created = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    created = std::strtoll(epoch, nullptr, 10);
  } else {
    created = std::chrono::duration_cast<std::chrono::seconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count();
  }
  manifest["created_unix"] = created;
  manifest["reports"] = nlohmann::ordered_json::array();
  manifest["files"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    manifest["reports"].push_back(
        {{"name", r.name}, {"seed", r.provenance.seed}, {"config_hash", r.provenance.config_hash},
         {"model_hashes", r.provenance.model_hashes}});
    for (const auto& f : formats) {
      const std::string text = f == "json" ? to_json(r) : to_csv(r);
      const auto path = dir / (r.name + "." + f);
      write(path, text);
      manifest["files"].push_back({{"path", path.filename().string()}, {"fnv1a", fnv1a_hex(text)}});
    }
  }
  write(dir / "manifest.json", manifest.dump(2) + "\n");
  return written;
}

}  // namespace purlab
