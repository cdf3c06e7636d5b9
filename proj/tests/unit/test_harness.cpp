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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "purlab/harness/harness.hpp"
#include "purlab/metrics/metrics.hpp"

namespace purlab {
namespace {

TEST(HarnessConfig, RoundTripsThroughJson) {
  LabConfig lab;
  lab.dataset.images_per_style = 9;
  lab.denoiser.learning_rate = 3e-4;
  EXPECT_EQ(to_json(lab_config_from_json(to_json(lab))), to_json(lab));

  StylePipelineConfig style;
  style.baselines = {PurifyMethod::kJpeg, PurifyMethod::kCombo};
  style.protection.adaptive_weight = 3.5;
  style.include_clean_impress = true;
  EXPECT_EQ(to_json(style_config_from_json(to_json(style))), to_json(style));

  EditPipelineConfig edit;
  edit.protection_method = "encoder";
  edit.protection = AttackConfig::encoder_defaults();
  EXPECT_EQ(to_json(edit_config_from_json(to_json(edit))), to_json(edit));

  const PurifyConfig p = purify_config_from_json(R"({"steps": 7})", PurifyConfig::edit_defaults());
  EXPECT_EQ(p.steps, 7u);
  EXPECT_EQ(p.alpha, PurifyConfig::edit_defaults().alpha);
}

TEST(HarnessConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(lab_config_from_json(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(style_config_from_json(R"({"finetune": {"stepz": 3}})"), ConfigError);
  EXPECT_THROW(style_config_from_json(R"({"victim_style": 1, "target_style": 1})"), ConfigError);
  EXPECT_THROW(edit_config_from_json(R"({"strength": 1.5})"), ConfigError);
  EXPECT_THROW(edit_config_from_json(R"({"protection_method": "glaze"})"), ConfigError);
  EXPECT_THROW(purify_config_from_json("[1,2]", PurifyConfig{}), ConfigError);
  EXPECT_THROW(purify_config_from_json("{", PurifyConfig{}), ConfigError);
}

TEST(HarnessSweep, ParameterNames) {
  EXPECT_EQ(parse_sweep_parameter("alpha"), SweepParameter::kAlpha);
  EXPECT_EQ(parse_sweep_parameter("delta_L"), SweepParameter::kDeltaL);
  EXPECT_EQ(parse_sweep_parameter("beta"), SweepParameter::kBetaAdapt);
  EXPECT_EQ(to_string(SweepParameter::kBetaAdapt), "beta_adapt");
  EXPECT_THROW(parse_sweep_parameter("gamma"), ConfigError);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(HarnessReport, EmitIsByteStableUnderSourceDateEpoch) {
  MetricReport r;
  r.name = "demo";
  r.add("img_000", "clean", "ssim", 0.75);
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto a = testing::temp_dir("emit_a"), b = testing::temp_dir("emit_b");
  const auto files = emit_report({r}, a);
  emit_report({r}, b);
  ::unsetenv("SOURCE_DATE_EPOCH");
  ASSERT_EQ(files.size(), 3u);
  for (const char* f : {"demo.json", "demo.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_NE(slurp(a / "manifest.json").find("\"created_unix\": 1700000000"), std::string::npos);
  EXPECT_EQ(report_from_json(slurp(a / "demo.json")), r);
  EXPECT_THROW(emit_report({r}, a, {"xml"}), ConfigError);
  EXPECT_THROW(emit_report({}, a), ConfigError);
}

// Untrained models and tiny budgets: checks plumbing, not outcomes.
class TinyPipeline : public ::testing::Test {
 protected:
  static LabModels make_models() {
    Rng rng(41);
    Autoencoder ae(rng);
    FeatureNet net(4, rng);
    Denoiser base(kDefaultTimesteps, rng);
    Denoiser full(kDefaultTimesteps, rng);
    return {ae, net, base, full, make_schedule(), {{"autoencoder.purlab", "0"}}};
  }

  LabModels models = make_models();
  std::vector<StyledImage> pool = generate_style_dataset({4, 3, 8.0, 16.0, 0.1, 5});
};

TEST_F(TinyPipeline, StyleRunIsDeterministicAndComplete) {
  StylePipelineConfig c;
  c.finetune_images = 2;
  c.generations = 2;
  c.finetune.steps = 2;
  c.finetune.batch_size = 2;
  c.protection.steps = 2;
  c.purify.steps = 2;
  c.baselines = {PurifyMethod::kJpeg};
  c.include_clean_impress = true;
  const PipelineResult a = run_style_pipeline(models, pool, c);
  const PipelineResult b = run_style_pipeline(models, pool, c);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.image_ids, (std::vector<std::string>{"img_000", "img_001"}));
  std::set<std::string> conditions;
  for (const auto& rec : a.report.records) conditions.insert(rec.condition);
  EXPECT_EQ(conditions, (std::set<std::string>{"clean", "protected", "jpeg", "impress", "clean_impress"}));
  for (const auto& name : conditions) {
    EXPECT_EQ(a.report.values(name, "victim_hit").size(), 2u) << name;
    const double acc = condition_accuracy(a.report, name);
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
  for (const auto& img : a.inputs.at("clean")) {
    EXPECT_TRUE(std::any_of(pool.begin(), pool.end(), [&](const StyledImage& s) {
      return s.style == c.victim_style && s.image == img;
    }));
  }
  EXPECT_EQ(a.report.provenance.seed, 0u);
  EXPECT_EQ(a.report.provenance.model_hashes, models.model_hashes);

  StylePipelineConfig other = c;
  other.seed = 1;
  EXPECT_NE(run_style_pipeline(models, pool, other).report, a.report);
}

TEST_F(TinyPipeline, StyleRunRejectsSmallPools) {
  StylePipelineConfig c;
  c.finetune_images = 4;  // only 3 victim images in the pool
  EXPECT_THROW(run_style_pipeline(models, pool, c), ConfigError);
}

TEST_F(TinyPipeline, EditRunComparesEveryConditionWithTheCleanEdit) {
  EditPipelineConfig c;
  c.images = 2;
  c.protection_method = "encoder";
  c.protection = AttackConfig::encoder_defaults();
  c.protection.steps = 2;
  c.purify.steps = 2;
  c.baselines = {PurifyMethod::kResize};
  const PipelineResult a = run_edit_pipeline(models, pool, c);
  EXPECT_EQ(a.report, run_edit_pipeline(models, pool, c).report);
  for (const char* cond : {"clean", "protected", "resize", "impress"}) {
    EXPECT_EQ(a.report.values(cond, "ssim").size(), 2u) << cond;
  }
  // The clean condition is the reference itself.
  EXPECT_NEAR(a.report.mean("clean", "ssim"), 1.0, 1e-12);
  EXPECT_EQ(a.report.mean("clean", "psnr"), kPsnrCap);
}

TEST_F(TinyPipeline, SweepPrefixesConditionsAndAggregates) {
  StylePipelineConfig c;
  c.finetune_images = 1;
  c.generations = 1;
  c.finetune.steps = 1;
  c.finetune.batch_size = 1;
  c.protection.steps = 1;
  c.purify.steps = 1;
  c.baselines = {};
  const MetricReport r = run_ablation_sweep(models, pool, c, SweepParameter::kAlpha, {0.1, 0.5});
  EXPECT_EQ(r.name, "sweep_alpha");
  EXPECT_EQ(r.values("alpha=0.5/impress", "accuracy").size(), 1u);
  EXPECT_EQ(r.values("alpha=0.1/clean", "victim_hit").size(), 1u);
  EXPECT_NE(r.config_json.find("\"sweep\""), std::string::npos);
  EXPECT_THROW(run_ablation_sweep(models, pool, c, SweepParameter::kAlpha, {0.1}), ConfigError);
}

}  // namespace
}  // namespace purlab
