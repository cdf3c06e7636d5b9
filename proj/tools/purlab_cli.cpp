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

// purlab command-line driver. Every subcommand accepts --config, --seed and
// --out; exit codes are 0 on success, 2 on configuration errors and 3 when a
// quality gate refuses the run.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "purlab/attacks/attacks.hpp"
#include "purlab/data/image_io.hpp"
#include "purlab/data/styles.hpp"
#include "purlab/harness/harness.hpp"
#include "purlab/metrics/metrics.hpp"
#include "purlab/metrics/report.hpp"
#include "purlab/models/training.hpp"
#include "purlab/purify/purify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace purlab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGate = 3;

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = ".";
};

// Parsed --config file, split into its sections.
struct ConfigFile {
  json root = json::object();

  std::string section(const char* name) const {
    return root.contains(name) ? root.at(name).dump() : std::string("{}");
  }
};

ConfigFile load_config(const Globals& g) {
  ConfigFile cf;
  if (g.config.empty()) return cf;
  std::ifstream in(g.config);
  if (!in) throw ConfigError("cannot open config file '" + g.config + "'");
  try {
    cf.root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + g.config + "': " + e.what());
  }
  if (!cf.root.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, value] : cf.root.items()) {
    static const std::vector<std::string> known{"lab", "style", "edit", "attack", "purify", "sweep"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config section '" + key + "' (lab, style, edit, attack, purify, sweep)");
    }
    if (!value.is_object()) throw ConfigError("config section '" + key + "' must be an object");
  }
  return cf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw std::runtime_error("cannot write '" + p.string() + "'");
}

std::string loss_csv(const std::vector<double>& curve) {
  std::string s = "step,loss\n";
  char line[64];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g\n", i, curve[i]);
    s += line;
  }
  return s;
}

fs::path out_dir(const Globals& g) {
  fs::path p(g.out);
  fs::create_directories(p);
  return p;
}

std::vector<StyledImage> dataset_or_generate(const std::string& dir, const StyleDatasetSpec& spec) {
  if (!dir.empty()) return load_dataset(dir);
  return generate_style_dataset(spec);
}

std::vector<IngestedImage> load_inputs(const std::string& input) {
  if (input.empty()) throw ConfigError("--input is required");
  if (fs::is_directory(input)) {
    auto images = ingest_images(input);
    for (auto& im : images) im.name = fs::path(im.name).stem().string();
    return images;
  }
  if (!fs::exists(input)) throw ConfigError("input '" + input + "' does not exist");
  Image img = read_png(input);
  if (img.height() != kImageSize || img.width() != kImageSize) img = center_crop_resize(img);
  return {{fs::path(input).stem().string(), img.clipped()}};
}

LabConfig lab_config(const ConfigFile& cf) { return lab_config_from_json(cf.section("lab")); }

void print_accuracy(const MetricReport& r) {
  for (const auto& a : r.aggregates()) {
    if (a.metric == "victim_hit") std::printf("  %-16s accuracy %.3f (n=%zu)\n", a.condition.c_str(), a.mean, a.count);
  }
}

// ---- gen-data -------------------------------------------------------------

int gen_data(const Globals& g, const std::string& split) {
  LabConfig lab = lab_config(load_config(g));
  if (g.seed_given) lab.dataset.seed = g.seed;
  const fs::path out = out_dir(g);
  if (split != "train" && split != "heldout" && split != "both") throw ConfigError("--split must be train, heldout or both");
  if (split != "heldout") {
    save_dataset(generate_style_dataset(lab.dataset), out / "train");
    std::cout << "wrote " << (out / "train").string() << "\n";
  }
  if (split != "train") {
    save_dataset(generate_style_dataset(lab.heldout), out / "heldout");
    std::cout << "wrote " << (out / "heldout").string() << "\n";
  }
  return 0;
}

// ---- train-* --------------------------------------------------------------

int train_ae(const Globals& g, const std::string& data_dir) {
  LabConfig lab = lab_config(load_config(g));
  if (g.seed_given) lab.autoencoder.seed = g.seed;
  const auto data = dataset_or_generate(data_dir, lab.dataset);
  const auto heldout = generate_style_dataset(lab.heldout);
  Rng init(lab.init_seed);
  Autoencoder ae(init);
  const auto curve = train_autoencoder(ae, images_of(data), lab.autoencoder);
  const double scale = calibrate_latent_scale(ae, images_of(data));
  const fs::path out = out_dir(g);
  ae.save(out / "autoencoder.purlab");
  write_text(out / "autoencoder_loss.csv", loss_csv(curve));
  std::printf("latent scale %.6g, held-out RMSE %.6g\n", scale, reconstruction_rmse(ae, images_of(heldout)));
  return 0;
}

int train_classifier(const Globals& g, const std::string& data_dir, const std::string& heldout_dir) {
  LabConfig lab = lab_config(load_config(g));
  if (g.seed_given) lab.classifier.seed = g.seed;
  const auto data = dataset_or_generate(data_dir, lab.dataset);
  const auto heldout = dataset_or_generate(heldout_dir, lab.heldout);
  std::size_t classes = 0;
  for (const auto& s : data) classes = std::max(classes, s.style + 1);
  Rng init(lab.init_seed);
  FeatureNet net(classes, init);
  const auto curve = train_style_classifier(net, images_of(data), labels_of(data), lab.classifier);
  const fs::path out = out_dir(g);
  net.save(out / "classifier.purlab");
  write_text(out / "classifier_loss.csv", loss_csv(curve));
  const auto cm = confusion_matrix(net, images_of(heldout), labels_of(heldout));
  const double acc = classifier_accuracy(net, images_of(heldout), labels_of(heldout));
  std::printf("held-out accuracy %.4f\n", acc);
  for (std::size_t r = 0; r < cm.size(); ++r) {
    std::printf("  %-12s", std::string(style_names()[r]).c_str());
    for (std::size_t v : cm[r]) std::printf(" %4zu", v);
    std::printf("\n");
  }
  if (acc < kSeparabilityGate) {
    throw GateError("held-out accuracy " + std::to_string(acc) + " is below the separability gate");
  }
  return 0;
}

int train_diffusion(const Globals& g, const std::string& data_dir, const std::string& models,
                    const std::string& variant) {
  LabConfig lab = lab_config(load_config(g));
  if (g.seed_given) lab.denoiser.seed = g.seed;
  if (variant != "base" && variant != "full") throw ConfigError("--variant must be base or full");
  const Autoencoder ae = Autoencoder::load(fs::path(models) / "autoencoder.purlab");
  std::vector<Image> images;
  for (const auto& s : dataset_or_generate(data_dir, lab.dataset)) {
    if (variant == "full" || s.style != lab.victim_style) images.push_back(s.image);
  }
  Rng init(lab.init_seed);
  Denoiser den(lab.timesteps, init);
  const auto curve = train_denoiser(den, ae, images, lab.schedule(), lab.denoiser);
  const fs::path out = out_dir(g);
  den.save(out / ("denoiser_" + variant + ".purlab"));
  write_text(out / ("denoiser_" + variant + "_loss.csv"), loss_csv(curve));
  std::printf("trained on %zu images, final loss %.6g\n", images.size(), curve.empty() ? 0.0 : curve.back());
  return 0;
}

// ---- protect / purify -----------------------------------------------------

struct ProtectArgs {
  std::string method = "glaze";
  std::string input, dataset, models = "models", target, target_style;
  std::vector<std::size_t> indices;
};

int protect(const Globals& g, const ProtectArgs& a) {
  const ConfigFile cf = load_config(g);
  AttackConfig defaults;
  if (a.method == "encoder") {
    defaults = AttackConfig::encoder_defaults();
  } else if (a.method == "diffusion") {
    defaults = AttackConfig::diffusion_defaults();
  } else if (a.method == "glaze") {
    defaults = AttackConfig::glaze_defaults();
  } else if (a.method == "adaptive-glaze") {
    defaults = AttackConfig::adaptive_defaults();
  } else {
    throw ConfigError("unknown protection method '" + a.method + "'");
  }
  AttackConfig config = attack_config_from_json(cf.section("attack"), defaults);
  if (g.seed_given) config.seed = g.seed;
  std::optional<Image> target_image;
  if (!a.target.empty()) target_image = center_crop_resize(read_png(a.target)).clipped();
  if (!a.target_style.empty()) config.target_style = parse_style(a.target_style);
  const bool styled = a.method == "glaze" || a.method == "adaptive-glaze";
  if (!styled && target_image) config.target = target_image;

  // Named inputs, with style geometry when they come from a dataset.
  std::vector<std::pair<std::string, StyledImage>> items;
  if (!a.dataset.empty()) {
    const auto data = load_dataset(a.dataset);
    for (std::size_t i : a.indices) {
      if (i >= data.size()) throw ConfigError("--index " + std::to_string(i) + " is outside the dataset");
      char name[32];
      std::snprintf(name, sizeof name, "%05zu", i);
      items.push_back({name, data[i]});
    }
    if (items.empty()) throw ConfigError("--dataset needs at least one --index");
  } else {
    for (auto& in : load_inputs(a.input)) items.push_back({in.name, StyledImage{in.image, 0, {}}});
  }
  if (styled && !config.target_style && !target_image) {
    throw ConfigError("glaze needs --target-style (dataset inputs) or --target (style image)");
  }
  if (styled && a.dataset.empty() && !target_image) {
    throw ConfigError("glaze on PNG inputs needs --target with the style-transferred image");
  }

  const fs::path models(a.models);
  const Autoencoder ae = Autoencoder::load(models / "autoencoder.purlab");
  std::optional<FeatureNet> net;
  if (styled) net.emplace(FeatureNet::load(models / "classifier.purlab"));
  std::optional<Denoiser> den;
  if (a.method == "diffusion") den.emplace(Denoiser::load(models / "denoiser_full.purlab"));
  const LabConfig lab = lab_config(cf);

  const fs::path out = out_dir(g);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& [name, x] = items[k];
    AttackConfig c = config;
    c.seed = mix_seed(config.seed, k);
    AttackResult r;
    if (a.method == "encoder") {
      r = encoder_attack(ae, x.image, c);
    } else if (a.method == "diffusion") {
      const LatentDiffusion ldm{ae, *den, lab.schedule()};
      r = diffusion_attack(ldm, x.image, c);
    } else if (target_image) {
      r = glaze_protect(ae, *net, x.image, *target_image, c);
    } else if (a.method == "glaze") {
      r = glaze_protect(ae, *net, x, c);
    } else {
      r = adaptive_glaze_protect(ae, *net, x, c);
    }
    write_png(r.protected_image, out / (name + ".png"), 16);
    write_text(out / (name + "_curve.csv"), attack_curve_csv(r.curve));
    json side;
    side["source"] = a.dataset.empty() ? a.input : a.dataset;
    side["name"] = name;
    side["method"] = a.method;
    side["seed"] = c.seed;
    side["config"] = json::parse(to_json(c));
    side["initial_loss"] = r.curve.empty() ? r.final_loss : r.curve.front().loss;
    side["final_loss"] = r.final_loss;
    side["software_version"] = kSoftwareVersion;
    write_text(out / (name + ".json"), side.dump(2) + "\n");
    std::printf("%s: loss %.6g -> %.6g\n", name.c_str(), side["initial_loss"].get<double>(), r.final_loss);
  }
  return 0;
}

int purify(const Globals& g, const std::string& method_name, const std::string& input, const std::string& models) {
  const ConfigFile cf = load_config(g);
  const PurifyMethod method = [&] {
    try {
      return parse_purify_method(method_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  PurifyConfig config = purify_config_from_json(cf.section("purify"), PurifyConfig::style_defaults());
  if (g.seed_given) config.seed = g.seed;
  const auto inputs = load_inputs(input);
  std::optional<Autoencoder> ae;
  std::optional<FeatureNet> net;
  if (method == PurifyMethod::kImpress) {
    ae.emplace(Autoencoder::load(fs::path(models) / "autoencoder.purlab"));
    net.emplace(FeatureNet::load(fs::path(models) / "classifier.purlab"));
  }
  const fs::path out = out_dir(g);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto& in = inputs[k];
    json side;
    side["source"] = input;
    side["name"] = in.name;
    side["method"] = std::string(to_string(method));
    side["seed"] = mix_seed(config.seed, k);
    Image result;
    if (method == PurifyMethod::kImpress) {
      PurifyConfig c = config;
      c.seed = mix_seed(config.seed, k);
      const PurifyResult r = impress_purify(*ae, *net, in.image, c);
      result = r.purified;
      write_text(out / (in.name + "_trajectory.csv"), trajectory_csv(r.trajectory));
      side["config"] = json::parse(to_json(c));
      side["final_consistency"] = r.trajectory.back().consistency;
      side["final_lpips"] = r.trajectory.back().lpips;
      side["final_combined"] = r.trajectory.back().combined;
    } else {
      result = apply_baseline(method, in.image, mix_seed(config.seed, k));
    }
    side["software_version"] = kSoftwareVersion;
    write_png(result, out / (in.name + ".png"), 16);
    write_text(out / (in.name + ".json"), side.dump(2) + "\n");
    std::printf("%s: purified with %s\n", in.name.c_str(), std::string(to_string(method)).c_str());
  }
  return 0;
}

// ---- pipelines --------------------------------------------------------------

std::vector<StyledImage> pipeline_pool(const std::string& pool_dir, const LabConfig& lab) {
  return dataset_or_generate(pool_dir, lab.heldout);
}

void save_inputs(const PipelineResult& r, const fs::path& dir) {
  for (const auto& [cond, images] : r.inputs) {
    fs::create_directories(dir / cond);
    for (std::size_t i = 0; i < images.size(); ++i) write_png(images[i], dir / cond / (r.image_ids[i] + ".png"), 16);
  }
}

int run_style(const Globals& g, const std::string& models, const std::string& pool_dir, bool save_images) {
  const ConfigFile cf = load_config(g);
  const LabConfig lab = lab_config(cf);
  StylePipelineConfig config = style_config_from_json(cf.section("style"));
  if (g.seed_given) config.seed = g.seed;
  const LabModels m = ensure_lab_models(lab, models, &std::cerr);
  const PipelineResult r = run_style_pipeline(m, pipeline_pool(pool_dir, lab), config, &std::cerr);
  const fs::path out = out_dir(g);
  emit_report({r.report}, out);
  if (save_images) save_inputs(r, out / "images");
  print_accuracy(r.report);
  return 0;
}

int run_edit(const Globals& g, const std::string& models, const std::string& pool_dir, bool save_images) {
  const ConfigFile cf = load_config(g);
  const LabConfig lab = lab_config(cf);
  EditPipelineConfig config = edit_config_from_json(cf.section("edit"));
  if (g.seed_given) config.seed = g.seed;
  const LabModels m = ensure_lab_models(lab, models, &std::cerr);
  const PipelineResult r = run_edit_pipeline(m, pipeline_pool(pool_dir, lab), config, &std::cerr);
  const fs::path out = out_dir(g);
  emit_report({r.report}, out);
  if (save_images) save_inputs(r, out / "images");
  for (const auto& a : r.report.aggregates()) {
    if (a.metric == "ssim" || a.metric == "psnr" || a.metric == "vifp") {
      std::printf("  %-10s %-5s %.4f +- %.4f\n", a.condition.c_str(), a.metric.c_str(), a.mean, a.std);
    }
  }
  return 0;
}

int sweep(const Globals& g, const std::string& models, const std::string& pool_dir, std::string parameter,
          std::vector<double> values) {
  const ConfigFile cf = load_config(g);
  const LabConfig lab = lab_config(cf);
  StylePipelineConfig config = style_config_from_json(cf.section("style"));
  if (g.seed_given) config.seed = g.seed;
  if (cf.root.contains("sweep")) {
    const json& s = cf.root.at("sweep");
    for (const auto& [key, value] : s.items()) {
      if (key != "parameter" && key != "values") throw ConfigError("unknown key sweep." + key);
    }
    try {
      if (parameter.empty() && s.contains("parameter")) parameter = s.at("parameter").get<std::string>();
      if (values.empty() && s.contains("values")) values = s.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("sweep: ") + e.what());
    }
  }
  if (parameter.empty()) throw ConfigError("sweep needs --parameter");
  const SweepParameter p = parse_sweep_parameter(parameter);
  if (p == SweepParameter::kBetaAdapt && config.protection.adaptive_weight == 0.0) {
    config.protection = AttackConfig::adaptive_defaults();
  }
  const LabModels m = ensure_lab_models(lab, models, &std::cerr);
  const MetricReport r = run_ablation_sweep(m, pipeline_pool(pool_dir, lab), config, p, values, &std::cerr);
  emit_report({r}, out_dir(g));
  for (const auto& rec : r.records) {
    if (rec.image_id == "aggregate") std::printf("  %-32s accuracy %.3f\n", rec.condition.c_str(), rec.value);
  }
  return 0;
}

int report(const Globals& g, const std::vector<std::string>& inputs, const std::vector<std::string>& formats) {
  if (inputs.empty()) throw ConfigError("report needs at least one --input report JSON");
  std::vector<MetricReport> reports;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    try {
      reports.push_back(report_from_json(text));
    } catch (const std::exception& e) {
      throw ConfigError("report '" + path + "': " + e.what());
    }
  }
  for (const auto& r : reports) {
    std::printf("%s (seed %llu, config %s)\n", r.name.c_str(), static_cast<unsigned long long>(r.provenance.seed),
                r.provenance.config_hash.c_str());
    for (const auto& a : r.aggregates()) {
      std::printf("  %-24s %-24s %12.6g +- %-10.4g n=%zu\n", a.condition.c_str(), a.metric.c_str(), a.mean, a.std,
                  a.count);
    }
  }
  if (!g.out.empty() && g.out != ".") emit_report(reports, out_dir(g), formats);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"purlab: protection and purification lab for toy latent diffusion models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed for the subcommand's random streams")
      ->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--out", g.out, "Output directory");

  std::string data_dir, heldout_dir, models = "models", variant = "full", split = "both", pool_dir;
  auto* gen = app.add_subcommand("gen-data", "Write the procedural style dataset as PNG + labels.json");
  gen->add_option("--split", split, "train, heldout or both");

  auto* tae = app.add_subcommand("train-ae", "Train the autoencoder");
  tae->add_option("--data", data_dir, "Dataset directory (default: generate)");
  auto* tcl = app.add_subcommand("train-classifier", "Train the style classifier / LPIPS trunk");
  tcl->add_option("--data", data_dir, "Dataset directory (default: generate)");
  tcl->add_option("--heldout", heldout_dir, "Held-out dataset directory (default: generate)");
  auto* tdf = app.add_subcommand("train-diffusion", "Train a latent denoiser");
  tdf->add_option("--data", data_dir, "Dataset directory (default: generate)");
  tdf->add_option("--models", models, "Directory holding autoencoder.purlab");
  tdf->add_option("--variant", variant, "full (all styles) or base (victim style held out)");

  ProtectArgs pa;
  auto* pro = app.add_subcommand("protect", "Add a protective perturbation");
  pro->add_option("--method", pa.method, "encoder|diffusion|glaze|adaptive-glaze")
      ->check(CLI::IsMember({"encoder", "diffusion", "glaze", "adaptive-glaze"}));
  pro->add_option("--input", pa.input, "PNG file or directory");
  pro->add_option("--dataset", pa.dataset, "Dataset directory (keeps style geometry)");
  pro->add_option("--index", pa.indices, "Dataset indices to protect");
  pro->add_option("--models", pa.models, "Model directory");
  pro->add_option("--target", pa.target, "Target image (encoder/diffusion) or style image (glaze)");
  pro->add_option("--target-style", pa.target_style, "Target style name or index for glaze");

  std::string purify_method = "impress", purify_input;
  auto* pur = app.add_subcommand("purify", "Purify protected images");
  pur->add_option("--method", purify_method, "impress|jpeg|noise|resize|lowpass|combo")
      ->check(CLI::IsMember({"impress", "jpeg", "noise", "resize", "lowpass", "combo"}));
  pur->add_option("--input", purify_input, "PNG file or directory")->required();
  pur->add_option("--models", models, "Model directory (impress)");

  bool save_images = false;
  auto* rst = app.add_subcommand("run-style", "Style-mimicking experiment");
  auto* red = app.add_subcommand("run-edit", "Malicious-editing experiment");
  std::string parameter;
  std::vector<double> values;
  auto* swp = app.add_subcommand("sweep", "Ablation sweep over alpha, delta_L or beta_adapt");
  swp->add_option("--parameter", parameter, "alpha|delta_L|beta_adapt");
  swp->add_option("--values", values, "Values to sweep")->delimiter(',');
  for (auto* s : {rst, red, swp}) {
    s->add_option("--models", models, "Lab model cache directory (trained when missing or stale)");
    s->add_option("--pool", pool_dir, "Image pool dataset directory (default: generated held-out set)");
  }
  for (auto* s : {rst, red}) s->add_flag("--save-images", save_images, "Also write every condition's inputs");

  std::vector<std::string> report_inputs, formats{"json", "csv"};
  auto* rep = app.add_subcommand("report", "Summarize report JSON files and re-emit them");
  rep->add_option("--input", report_inputs, "Report JSON files")->required();
  rep->add_option("--format", formats, "json and/or csv")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) return gen_data(g, split);
    if (*tae) return train_ae(g, data_dir);
    if (*tcl) return train_classifier(g, data_dir, heldout_dir);
    if (*tdf) return train_diffusion(g, data_dir, models, variant);
    if (*pro) return protect(g, pa);
    if (*pur) return purify(g, purify_method, purify_input, models);
    if (*rst) return run_style(g, models, pool_dir, save_images);
    if (*red) return run_edit(g, models, pool_dir, save_images);
    if (*swp) return sweep(g, models, pool_dir, parameter, values);
    if (*rep) return report(g, report_inputs, formats);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GateError& e) {
    std::cerr << "gate failure: " << e.what() << "\n";
    return kExitGate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
