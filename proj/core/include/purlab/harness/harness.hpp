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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "purlab/attacks/attacks.hpp"
#include "purlab/data/styles.hpp"
#include "purlab/diffusion/diffusion.hpp"
#include "purlab/metrics/report.hpp"
#include "purlab/models/networks.hpp"
#include "purlab/models/training.hpp"
#include "purlab/purify/purify.hpp"

namespace purlab {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quality gate refused to let an experiment proceed (CLI exit code 3).
class GateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSeparabilityGate = 0.95;

/// Everything needed to train the shared models from scratch.
struct LabConfig {
  StyleDatasetSpec dataset;
  StyleDatasetSpec heldout{kMaxStyles, 64, 8.0, 16.0, 0.1, 1001};
  std::size_t victim_style = 0;
  std::size_t timesteps = kDefaultTimesteps;
  double beta_min = kDefaultBetaMin;
  double beta_max = kDefaultBetaMax;
  TrainConfig autoencoder{4000, 8, 2e-3, 0};
  TrainConfig classifier{1000, 16, 1e-3, 0};
  TrainConfig denoiser{6000, 16, 1e-3, 0};
  std::uint64_t init_seed = 0;

  NoiseSchedule schedule() const { return make_schedule(timesteps, beta_min, beta_max); }
};

struct LabModels {
  Autoencoder autoencoder;
  /// Style classifier; its conv trunk is also the LPIPS backbone.
  FeatureNet classifier;
  /// Pretrained on every style except the victim's.
  Denoiser base_denoiser;
  /// Pretrained on all styles; used for editing.
  Denoiser full_denoiser;
  NoiseSchedule schedule;
  std::map<std::string, std::string> model_hashes;
};

/// Loads the models from `dir` when its lab.json matches `config`,
/// otherwise trains them, enforces the quality gates, and writes them.
LabModels ensure_lab_models(const LabConfig& config, const std::filesystem::path& dir,
                            std::ostream* log = nullptr);
/// Loads models written by ensure_lab_models without checking the config.
LabModels load_lab_models(const std::filesystem::path& dir);

/// Trains a quick classifier on `train` and checks held-out accuracy on
/// `heldout`; throws GateError with the confusion matrix below the gate.
double separability_gate(const std::vector<StyledImage>& train, const std::vector<StyledImage>& heldout,
                         std::size_t num_styles, const TrainConfig& config);

struct StylePipelineConfig {
  std::size_t victim_style = 0;
  std::size_t target_style = 1;
  std::size_t finetune_images = 24;
  std::size_t generations = 100;
  TrainConfig finetune{500, 8, 1e-3, 0};
  AttackConfig protection = AttackConfig::glaze_defaults();
  PurifyConfig purify = PurifyConfig::style_defaults();
  std::vector<PurifyMethod> baselines = baseline_methods();
  bool include_impress = true;
  /// Also purify the untouched clean images (no-harm control).
  bool include_clean_impress = false;
  std::uint64_t seed = 0;
};

struct EditPipelineConfig {
  std::size_t images = 24;
  double strength = kDefaultStrength;
  double mask_fraction = 0.25;
  /// "encoder" or "diffusion".
  std::string protection_method = "diffusion";
  AttackConfig protection = AttackConfig::diffusion_defaults();
  PurifyConfig purify = PurifyConfig::edit_defaults();
  std::vector<PurifyMethod> baselines = baseline_methods();
  bool include_impress = true;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  MetricReport report;
  /// Condition name -> prepared input images, in pool-draw order.
  std::map<std::string, std::vector<Image>> inputs;
  std::vector<std::string> image_ids;
};

/// Protect, purify, fine-tune, generate, classify. Accuracy per condition
/// is the mean of the "victim_hit" records.
PipelineResult run_style_pipeline(const LabModels& models, const std::vector<StyledImage>& pool,
                                  const StylePipelineConfig& config, std::ostream* log = nullptr);

/// Protect, purify, edit, and compare every condition's edit with the
/// clean image's edit under the same noise.
PipelineResult run_edit_pipeline(const LabModels& models, const std::vector<StyledImage>& pool,
                                 const EditPipelineConfig& config, std::ostream* log = nullptr);

enum class SweepParameter { kAlpha, kDeltaL, kBetaAdapt };
SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepParameter p);

/// Reruns the style pipeline per value. Conditions are prefixed with
/// "<parameter>=<value>/"; aggregate accuracy rows are added under image
/// id "aggregate".
MetricReport run_ablation_sweep(const LabModels& models, const std::vector<StyledImage>& pool,
                                const StylePipelineConfig& base, SweepParameter parameter,
                                const std::vector<double>& values, std::ostream* log = nullptr);

/// Writes <name>.json and/or <name>.csv per report plus manifest.json and
/// returns the written paths. Formats: "json", "csv".
std::vector<std::filesystem::path> emit_report(const std::vector<MetricReport>& reports,
                                               const std::filesystem::path& dir,
                                               const std::vector<std::string>& formats = {"json", "csv"});

/// Accuracy table helpers.
double condition_accuracy(const MetricReport& report, const std::string& condition);

/// Canonical JSON of each config; parsing rejects unknown keys and bad
/// values with ConfigError. Missing keys keep their defaults.
std::string to_json(const LabConfig& c);
std::string to_json(const StylePipelineConfig& c);
std::string to_json(const EditPipelineConfig& c);
std::string to_json(const AttackConfig& c);
std::string to_json(const PurifyConfig& c);
LabConfig lab_config_from_json(const std::string& text);
StylePipelineConfig style_config_from_json(const std::string& text);
EditPipelineConfig edit_config_from_json(const std::string& text);
AttackConfig attack_config_from_json(const std::string& text, AttackConfig defaults);
PurifyConfig purify_config_from_json(const std::string& text, PurifyConfig defaults);

inline constexpr const char* kSoftwareVersion = "0.1.0";

}  // namespace purlab
