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

#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "purlab/harness/harness.hpp"

namespace purlab {

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<StyledImage> select_styles(const std::vector<StyledImage>& data, std::size_t exclude) {
  std::vector<StyledImage> out;
  for (const auto& s : data) {
    if (s.style != exclude) out.push_back(s);
  }
  return out;
}

std::string format_confusion(const std::vector<std::vector<std::size_t>>& m) {
  std::ostringstream os;
  os << "confusion matrix (rows true, columns predicted):\n";
  for (std::size_t r = 0; r < m.size(); ++r) {
    os << "  " << style_names()[r] << ":";
    for (std::size_t v : m[r]) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

}  // namespace

double separability_gate(const std::vector<StyledImage>& train, const std::vector<StyledImage>& heldout,
                         std::size_t num_styles, const TrainConfig& config) {
  Rng rng(config.seed);
  FeatureNet net(num_styles, rng);
  train_style_classifier(net, images_of(train), labels_of(train), config);
  const auto images = images_of(heldout);
  const auto labels = labels_of(heldout);
  const double acc = classifier_accuracy(net, images, labels);
  if (acc < kSeparabilityGate) {
    throw GateError("styles are not separable: held-out accuracy " + std::to_string(acc) + " < " +
                    std::to_string(kSeparabilityGate) + "\n" +
                    format_confusion(confusion_matrix(net, images, labels)));
  }
  return acc;
}

LabModels load_lab_models(const std::filesystem::path& dir) {
  const NoiseSchedule schedule = lab_config_from_json(read_text(dir / "lab.json")).schedule();
  LabModels m{Autoencoder::load(dir / "autoencoder.purlab"), FeatureNet::load(dir / "classifier.purlab"),
              Denoiser::load(dir / "denoiser_base.purlab"), Denoiser::load(dir / "denoiser_full.purlab"),
              schedule, {}};
  for (const char* f : {"autoencoder.purlab", "classifier.purlab", "denoiser_base.purlab", "denoiser_full.purlab"}) {
    m.model_hashes[f] = file_hash(dir / f);
  }
  return m;
}

LabModels ensure_lab_models(const LabConfig& config, const std::filesystem::path& dir, std::ostream* log) {
  const std::string wanted = to_json(config);
  if (read_text(dir / "lab.json") == wanted + "\n") {
    try {
      LabModels m = load_lab_models(dir);
      note(log, "loaded cached models from " + dir.string());
      return m;
    } catch (const std::exception& e) {
      note(log, std::string("cached models unusable (") + e.what() + "), retraining");
    }
  }
  std::filesystem::create_directories(dir);
  std::filesystem::remove(dir / "lab.json");
  const auto data = generate_style_dataset(config.dataset);
  const auto heldout = generate_style_dataset(config.heldout);
  const auto images = images_of(data);
  Rng init(config.init_seed);

  note(log, "training autoencoder");
  Autoencoder ae(init);
  train_autoencoder(ae, images, config.autoencoder);
  calibrate_latent_scale(ae, images);
  const double rmse = reconstruction_rmse(ae, images_of(heldout));
  note(log, "  held-out RMSE " + std::to_string(rmse));

  note(log, "training style classifier");
  FeatureNet classifier(config.dataset.num_styles, init);
  train_style_classifier(classifier, images, labels_of(data), config.classifier);
  const auto h_images = images_of(heldout);
  const auto h_labels = labels_of(heldout);
  const double acc = classifier_accuracy(classifier, h_images, h_labels);
  note(log, "  held-out accuracy " + std::to_string(acc));
  if (acc < kSeparabilityGate) {
    throw GateError("style classifier below the separability gate: " + std::to_string(acc) + "\n" +
                    format_confusion(confusion_matrix(classifier, h_images, h_labels)));
  }

  const NoiseSchedule schedule = config.schedule();
  note(log, "training base denoiser (victim style held out)");
  Denoiser base(config.timesteps, init);
  train_denoiser(base, ae, images_of(select_styles(data, config.victim_style)), schedule, config.denoiser);
  note(log, "training full denoiser");
  Denoiser full(config.timesteps, init);
  train_denoiser(full, ae, images, schedule, config.denoiser);

  ae.save(dir / "autoencoder.purlab");
  classifier.save(dir / "classifier.purlab");
  base.save(dir / "denoiser_base.purlab");
  full.save(dir / "denoiser_full.purlab");
  {
    std::ofstream out(dir / "lab.json");
    out << wanted << '\n';
  }
  return load_lab_models(dir);
}

}  // namespace purlab
