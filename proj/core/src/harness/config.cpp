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
#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "purlab/data/image_io.hpp"
#include "purlab/harness/harness.hpp"

namespace purlab {

namespace {

using json = nlohmann::ordered_json;

json parse(const std::string& text, const char* what) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError(std::string(what) + " config must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + " config is not valid JSON: " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::size_t read_style(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_style(v.get<std::string>());
    const auto id = v.get<std::size_t>();
    if (id >= kMaxStyles) throw ConfigError(where + ": style id " + std::to_string(id) + " out of range");
    return id;
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

json train_json(const TrainConfig& c) {
  return {{"steps", c.steps}, {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate}, {"seed", c.seed}};
}

TrainConfig train_from(const json& j, TrainConfig c, const std::string& where) {
  check_keys(j, {"steps", "batch_size", "learning_rate", "seed"}, where);
  read(j, "steps", c.steps, where);
  read(j, "batch_size", c.batch_size, where);
  read(j, "learning_rate", c.learning_rate, where);
  read(j, "seed", c.seed, where);
  if (c.batch_size == 0 || !(c.learning_rate > 0.0)) {
    throw ConfigError(where + ": batch_size and learning_rate must be positive");
  }
  return c;
}

json dataset_json(const StyleDatasetSpec& s) {
  return {{"num_styles", s.num_styles}, {"images_per_style", s.images_per_style}, {"min_period", s.min_period},
          {"max_period", s.max_period}, {"max_tone", s.max_tone},           {"seed", s.seed}};
}

StyleDatasetSpec dataset_from(const json& j, StyleDatasetSpec s, const std::string& where) {
  check_keys(j, {"num_styles", "images_per_style", "min_period", "max_period", "max_tone", "seed"}, where);
  read(j, "num_styles", s.num_styles, where);
  read(j, "images_per_style", s.images_per_style, where);
  read(j, "min_period", s.min_period, where);
  read(j, "max_period", s.max_period, where);
  read(j, "max_tone", s.max_tone, where);
  read(j, "seed", s.seed, where);
  if (s.num_styles < 2 || s.num_styles > kMaxStyles) {
    throw ConfigError(where + ".num_styles must lie in [2, " + std::to_string(kMaxStyles) + "]");
  }
  return s;
}

json attack_json(const AttackConfig& c) {
  json j = {{"budget_kind", std::string(to_string(c.budget_kind))},
            {"budget", c.budget},
            {"steps", c.steps},
            {"learning_rate", c.learning_rate},
            {"optimizer", std::string(to_string(c.optimizer))},
            {"lpips_weight", c.lpips_weight},
            {"adaptive_weight", c.adaptive_weight},
            {"truncation", c.truncation},
            {"strength", c.strength},
            {"seed", c.seed}};
  j["ortho"] = c.ortho == OrthoPrimary::kNone ? "none"
               : c.ortho == OrthoPrimary::kProtection ? "protection"
                                                       : "consistency";
  if (c.target) j["target"] = *c.target == gray_target() ? "gray" : "custom";
  if (c.target_style) j["target_style"] = std::string(style_names()[*c.target_style]);
  return j;
}

AttackConfig attack_from(const json& j, AttackConfig c, const std::string& where) {
  check_keys(j, {"budget_kind", "budget", "steps", "learning_rate", "optimizer", "lpips_weight", "adaptive_weight",
                 "truncation", "strength", "ortho", "seed", "target", "target_style"},
             where);
  try {
    if (j.contains("budget_kind")) c.budget_kind = parse_budget_kind(j.at("budget_kind").get<std::string>());
    if (j.contains("optimizer")) c.optimizer = parse_optimizer_kind(j.at("optimizer").get<std::string>());
    if (j.contains("ortho")) c.ortho = parse_ortho_primary(j.at("ortho").get<std::string>());
    if (j.contains("target")) {
      const auto t = j.at("target").get<std::string>();
      c.target = t == "gray" ? gray_target() : center_crop_resize(read_png(t)).clipped();
    }
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  read(j, "budget", c.budget, where);
  read(j, "steps", c.steps, where);
  read(j, "learning_rate", c.learning_rate, where);
  read(j, "lpips_weight", c.lpips_weight, where);
  read(j, "adaptive_weight", c.adaptive_weight, where);
  read(j, "truncation", c.truncation, where);
  read(j, "strength", c.strength, where);
  read(j, "seed", c.seed, where);
  if (j.contains("target_style")) c.target_style = read_style(j.at("target_style"), where + ".target_style");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return c;
}

json purify_json(const PurifyConfig& c) {
  return {{"alpha", c.alpha},
          {"lpips_budget", c.lpips_budget},
          {"learning_rate", c.learning_rate},
          {"steps", c.steps},
          {"init_sigma", c.init_sigma},
          {"optimizer", std::string(to_string(c.optimizer))},
          {"seed", c.seed},
          {"snapshot_every", c.snapshot_every}};
}

PurifyConfig purify_from(const json& j, PurifyConfig c, const std::string& where) {
  check_keys(j, {"alpha", "lpips_budget", "learning_rate", "steps", "init_sigma", "optimizer", "seed",
                 "snapshot_every"},
             where);
  read(j, "alpha", c.alpha, where);
  read(j, "lpips_budget", c.lpips_budget, where);
  read(j, "learning_rate", c.learning_rate, where);
  read(j, "steps", c.steps, where);
  read(j, "init_sigma", c.init_sigma, where);
  read(j, "seed", c.seed, where);
  read(j, "snapshot_every", c.snapshot_every, where);
  try {
    if (j.contains("optimizer")) c.optimizer = parse_optimizer_kind(j.at("optimizer").get<std::string>());
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return c;
}

json baselines_json(const std::vector<PurifyMethod>& b) {
  json arr = json::array();
  for (auto m : b) arr.push_back(std::string(to_string(m)));
  return arr;
}

std::vector<PurifyMethod> baselines_from(const json& j, const std::string& where) {
  std::vector<PurifyMethod> out;
  try {
    for (const auto& v : j) {
      const auto m = parse_purify_method(v.get<std::string>());
      if (m == PurifyMethod::kImpress) throw ConfigError(where + ": impress is not a baseline");
      out.push_back(m);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return out;
}

}  // namespace

std::string to_json(const LabConfig& c) {
  json j = {{"dataset", dataset_json(c.dataset)},
            {"heldout", dataset_json(c.heldout)},
            {"victim_style", std::string(style_names()[c.victim_style])},
            {"timesteps", c.timesteps},
            {"beta_min", c.beta_min},
            {"beta_max", c.beta_max},
            {"autoencoder", train_json(c.autoencoder)},
            {"classifier", train_json(c.classifier)},
            {"denoiser", train_json(c.denoiser)},
            {"init_seed", c.init_seed}};
  return j.dump();
}

LabConfig lab_config_from_json(const std::string& text) {
  const json j = parse(text, "lab");
  check_keys(j, {"dataset", "heldout", "victim_style", "timesteps", "beta_min", "beta_max", "autoencoder",
                 "classifier", "denoiser", "init_seed"},
             "lab");
  LabConfig c;
  if (j.contains("dataset")) c.dataset = dataset_from(j.at("dataset"), c.dataset, "lab.dataset");
  if (j.contains("heldout")) c.heldout = dataset_from(j.at("heldout"), c.heldout, "lab.heldout");
  if (j.contains("victim_style")) c.victim_style = read_style(j.at("victim_style"), "lab.victim_style");
  read(j, "timesteps", c.timesteps, "lab");
  read(j, "beta_min", c.beta_min, "lab");
  read(j, "beta_max", c.beta_max, "lab");
  if (j.contains("autoencoder")) c.autoencoder = train_from(j.at("autoencoder"), c.autoencoder, "lab.autoencoder");
  if (j.contains("classifier")) c.classifier = train_from(j.at("classifier"), c.classifier, "lab.classifier");
  if (j.contains("denoiser")) c.denoiser = train_from(j.at("denoiser"), c.denoiser, "lab.denoiser");
  read(j, "init_seed", c.init_seed, "lab");
  try {
    c.schedule();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("lab: ") + e.what());
  }
  if (c.victim_style >= c.dataset.num_styles) throw ConfigError("lab.victim_style is not in the dataset");
  return c;
}

std::string to_json(const AttackConfig& c) { return attack_json(c).dump(); }
std::string to_json(const PurifyConfig& c) { return purify_json(c).dump(); }

AttackConfig attack_config_from_json(const std::string& text, AttackConfig defaults) {
  return attack_from(parse(text, "attack"), std::move(defaults), "attack");
}

PurifyConfig purify_config_from_json(const std::string& text, PurifyConfig defaults) {
  return purify_from(parse(text, "purify"), defaults, "purify");
}

std::string to_json(const StylePipelineConfig& c) {
  json j = {{"victim_style", std::string(style_names()[c.victim_style])},
            {"target_style", std::string(style_names()[c.target_style])},
            {"finetune_images", c.finetune_images},
            {"generations", c.generations},
            {"finetune", train_json(c.finetune)},
            {"protection", attack_json(c.protection)},
            {"purify", purify_json(c.purify)},
            {"baselines", baselines_json(c.baselines)},
            {"include_impress", c.include_impress},
            {"include_clean_impress", c.include_clean_impress},
            {"seed", c.seed}};
  return j.dump();
}

StylePipelineConfig style_config_from_json(const std::string& text) {
  const json j = parse(text, "style");
  check_keys(j, {"victim_style", "target_style", "finetune_images", "generations", "finetune", "protection",
                 "purify", "baselines", "include_impress", "include_clean_impress", "seed"},
             "style");
  StylePipelineConfig c;
  if (j.contains("victim_style")) c.victim_style = read_style(j.at("victim_style"), "style.victim_style");
  if (j.contains("target_style")) c.target_style = read_style(j.at("target_style"), "style.target_style");
  read(j, "finetune_images", c.finetune_images, "style");
  read(j, "generations", c.generations, "style");
  if (j.contains("finetune")) c.finetune = train_from(j.at("finetune"), c.finetune, "style.finetune");
  if (j.contains("protection")) c.protection = attack_from(j.at("protection"), c.protection, "style.protection");
  if (j.contains("purify")) c.purify = purify_from(j.at("purify"), c.purify, "style.purify");
  if (j.contains("baselines")) c.baselines = baselines_from(j.at("baselines"), "style.baselines");
  read(j, "include_impress", c.include_impress, "style");
  read(j, "include_clean_impress", c.include_clean_impress, "style");
  read(j, "seed", c.seed, "style");
  if (c.victim_style == c.target_style) throw ConfigError("style.target_style must differ from the victim style");
  if (c.finetune_images == 0 || c.generations == 0) {
    throw ConfigError("style.finetune_images and style.generations must be positive");
  }
  return c;
}

std::string to_json(const EditPipelineConfig& c) {
  json j = {{"images", c.images},
            {"strength", c.strength},
            {"mask_fraction", c.mask_fraction},
            {"protection_method", c.protection_method},
            {"protection", attack_json(c.protection)},
            {"purify", purify_json(c.purify)},
            {"baselines", baselines_json(c.baselines)},
            {"include_impress", c.include_impress},
            {"seed", c.seed}};
  return j.dump();
}

EditPipelineConfig edit_config_from_json(const std::string& text) {
  const json j = parse(text, "edit");
  check_keys(j, {"images", "strength", "mask_fraction", "protection_method", "protection", "purify", "baselines",
                 "include_impress", "seed"},
             "edit");
  EditPipelineConfig c;
  read(j, "images", c.images, "edit");
  read(j, "strength", c.strength, "edit");
  read(j, "mask_fraction", c.mask_fraction, "edit");
  read(j, "protection_method", c.protection_method, "edit");
  if (c.protection_method == "encoder") {
    c.protection = AttackConfig::encoder_defaults();
  } else if (c.protection_method != "diffusion") {
    throw ConfigError("edit.protection_method must be 'encoder' or 'diffusion'");
  }
  c.protection.target = gray_target();
  if (j.contains("protection")) c.protection = attack_from(j.at("protection"), c.protection, "edit.protection");
  if (j.contains("purify")) c.purify = purify_from(j.at("purify"), c.purify, "edit.purify");
  if (j.contains("baselines")) c.baselines = baselines_from(j.at("baselines"), "edit.baselines");
  read(j, "include_impress", c.include_impress, "edit");
  read(j, "seed", c.seed, "edit");
  if (c.images == 0) throw ConfigError("edit.images must be positive");
  if (!(c.strength > 0.0 && c.strength <= 1.0)) throw ConfigError("edit.strength must lie in (0, 1]");
  if (!(c.mask_fraction >= 0.0 && c.mask_fraction <= 1.0)) throw ConfigError("edit.mask_fraction must lie in [0, 1]");
  return c;
}

}  // namespace purlab
