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

// Acceptance run: prints one PASS/FAIL line per criterion on stdout and
// exits 3 when any criterion fails. Progress goes to stderr.
//
//   acceptance --prepare --models DIR   train (or reuse) the lab models
//   acceptance --models DIR [--only 1,2,...]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "grad_cases.hpp"
#include "purlab/attacks/attacks.hpp"
#include "purlab/autodiff/gradcheck.hpp"
#include "purlab/harness/harness.hpp"
#include "purlab/metrics/metrics.hpp"

namespace purlab {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kGradTolerance = 1e-3;
constexpr std::size_t kGradCases = 20;
constexpr std::size_t kStyleSeeds = 3;
constexpr std::size_t kStylePurifySteps = 500;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<StyledImage> pool_for(const LabConfig& lab) { return generate_style_dataset(lab.heldout); }

// ---------------------------------------------------------------------------

Outcome gradients(const LabModels& m) {
  double worst = 0.0;
  std::string worst_name;
  std::map<std::string, std::size_t> counts;
  auto check = [&](const testing::GradCase& c) {
    const double e = finite_difference_check(c.f, c.x);
    ++counts[c.name];
    if (e > worst) {
      worst = e;
      worst_name = c.name;
    }
  };
  for (std::size_t s = 0; s < kGradCases; ++s) {
    for (const auto& c : testing::primitive_cases(1000 + s)) check(c);
    for (const auto& c : testing::network_cases(2000 + s, m.autoencoder, m.full_denoiser, m.classifier)) check(c);

    // Whole reconstruction through the sampler, every step differentiated.
    Rng rng(3000 + s);
    const Tensor basis = testing::uniform({3 * 32 * 32, 12}, rng, -0.02, 0.02);
    const Tensor anchor = testing::uniform({3, 32, 32}, rng, -0.6, 0.6);
    const Tensor eps = rng.normal_tensor({4, 8, 8});
    const LatentDiffusion ldm{m.autoencoder, m.full_denoiser, m.schedule};
    check({"ldm_reconstruct",
           [&, basis, anchor, eps](const Tensor& c) {
             const Tensor x = ops::add(anchor, ops::reshape(ops::matmul(basis, ops::reshape(c, {12, 1})), {3, 32, 32}));
             return testing::contract(reconstruct_ldm(ldm, x, 0.3, eps), 3000 + s);
           },
           testing::uniform({12}, rng, -1, 1)});
  }
  std::size_t fewest = SIZE_MAX;
  for (const auto& [name, n] : counts) fewest = std::min(fewest, n);
  return {worst < kGradTolerance && fewest >= kGradCases,
          std::to_string(counts.size()) + " graphs x " + std::to_string(fewest) + " cases, worst relative error " +
              fmt("%.2e", worst) + " (" + worst_name + ")"};
}

Outcome metric_identities(const LabModels& m, const std::vector<StyledImage>& pool) {
  double ssim_dev = 0.0, vifp_dev = 0.0, psnr_dev = 0.0;
  bool lpips_ok = true;
  std::size_t n = 0;
  for (std::size_t i = 0; i < pool.size(); i += 8) {
    const Image& x = pool[i].image;
    const Image& y = pool[(i + 13) % pool.size()].image;
    Rng rng(i);
    Image z = x;
    for (double& v : z.pixels()) v = std::clamp(v + 0.05 * rng.normal(), -1.0, 1.0);
    ssim_dev = std::max(ssim_dev, std::abs(ssim(x, x) - 1.0));
    vifp_dev = std::max(vifp_dev, std::abs(vifp(x, x) - 1.0));
    double se = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = (x.pixels()[k] - z.pixels()[k]) / 2.0;
      se += d * d;
    }
    const double hand = 10.0 * std::log10(1.0 / (se / static_cast<double>(x.size())));
    psnr_dev = std::max(psnr_dev, std::abs(psnr(x, z) - hand));
    lpips_ok = lpips_ok && lpips_proxy(m.classifier, x, x) == 0.0 &&
               lpips_proxy(m.classifier, x, y) == lpips_proxy(m.classifier, y, x) &&
               lpips_proxy(m.classifier, x, z) == lpips_proxy(m.classifier, z, x);
    ++n;
  }
  return {ssim_dev <= 1e-6 && vifp_dev <= 1e-6 && psnr_dev <= 1e-9 && lpips_ok,
          std::to_string(n) + " images: |ssim-1| " + fmt("%.1e", ssim_dev) + ", |vifp-1| " + fmt("%.1e", vifp_dev) +
              ", psnr vs hand " + fmt("%.1e", psnr_dev) + ", lpips zero+symmetric " + (lpips_ok ? "yes" : "NO")};
}

Outcome attack_constraints(const LabModels& m, const std::vector<StyledImage>& pool) {
  constexpr std::size_t kImages = 6;
  std::size_t steps = 0, violations = 0;
  double max_glaze_lpips = 0.0;
  const LatentDiffusion ldm{m.autoencoder, m.full_denoiser, m.schedule};
  auto l2 = [](const Image& a, const Image& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a.pixels()[k] - b.pixels()[k]) * (a.pixels()[k] - b.pixels()[k]);
    return std::sqrt(s);
  };
  for (std::size_t i = 0; i < kImages; ++i) {
    const StyledImage& x = pool[i * 37 % pool.size()];
    {
      const AttackConfig c = AttackConfig::encoder_defaults();
      const AttackResult r = encoder_attack(m.autoencoder, x.image, c);
      for (const auto& s : r.curve) violations += (s.delta_norm > c.budget) + (s.range_violation > 0.0);
      violations += (max_abs_diff(r.protected_image, x.image) > c.budget) + !r.protected_image.in_range();
      steps += r.curve.size();
    }
    {
      AttackConfig c = AttackConfig::diffusion_defaults();
      c.seed = i;
      const AttackResult r = diffusion_attack(ldm, x.image, c);
      for (const auto& s : r.curve) violations += (s.delta_norm > c.budget) + (s.range_violation > 0.0);
      violations += (l2(r.protected_image, x.image) > c.budget) + !r.protected_image.in_range();
      steps += r.curve.size();
    }
    for (bool adaptive : {false, true}) {
      AttackConfig c = adaptive ? AttackConfig::adaptive_defaults() : AttackConfig::glaze_defaults();
      c.target_style = (x.style + 1) % kMaxStyles;
      const AttackResult r = adaptive ? adaptive_glaze_protect(m.autoencoder, m.classifier, x, c)
                                      : glaze_protect(m.autoencoder, m.classifier, x, c);
      for (const auto& s : r.curve) {
        violations += s.range_violation > 0.0;
        max_glaze_lpips = std::max(max_glaze_lpips, s.delta_norm);
      }
      violations += !r.protected_image.in_range();
      steps += r.curve.size();
    }
    std::cerr << "  constraints: image " << i + 1 << "/" << kImages << std::endl;
  }
  return {violations == 0, std::to_string(steps) + " attack steps (encoder/diffusion/glaze/adaptive, " +
                               std::to_string(kImages) + " images each), " + std::to_string(violations) +
                               " violations; glaze LPIPS penalty term peak " + fmt("%.3f", max_glaze_lpips)};
}

// Shared by criteria 4, 5, 6 and 8.
struct StyleRuns {
  std::vector<MetricReport> reports;
};

StyleRuns run_style(const LabModels& m, const std::vector<StyledImage>& pool) {
  StyleRuns runs;
  for (std::size_t s = 0; s < kStyleSeeds; ++s) {
    StylePipelineConfig c;
    c.seed = s;
    c.purify.steps = kStylePurifySteps;
    c.include_clean_impress = true;
    std::cerr << "style pipeline, seed " << s << std::endl;
    runs.reports.push_back(run_style_pipeline(m, pool, c, &std::cerr).report);
  }
  return runs;
}

Outcome consistency_gap(const StyleRuns& runs) {
  std::vector<double> clean, prot;
  std::size_t halved = 0, n = 0;
  for (const auto& r : runs.reports) {
    const auto c = r.values("clean", "consistency");
    const auto p = r.values("protected", "consistency");
    const auto q = r.values("impress", "consistency");
    clean.insert(clean.end(), c.begin(), c.end());
    prot.insert(prot.end(), p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i) halved += q[i] <= 0.5 * p[i];
    n += p.size();
  }
  const double ratio = mean_of(prot) / mean_of(clean);
  const double frac = static_cast<double>(halved) / static_cast<double>(n);
  return {n >= 50 && ratio >= 1.5 && frac >= 0.9,
          std::to_string(n) + " images: protected/clean consistency " + fmt("%.1f", ratio) + "x (" +
              fmt("%.2e", mean_of(prot)) + " vs " + fmt("%.2e", mean_of(clean)) + "), purified <= 0.5x protected on " +
              fmt("%.1f", 100 * frac) + "%"};
}

Outcome latent_trend(const StyleRuns& runs) {
  std::size_t down = 0, n = 0;
  double first = 0.0, last = 0.0;
  for (const auto& r : runs.reports) {
    const auto a = r.values("impress", "latent_distance_first");
    const auto b = r.values("impress", "latent_distance_last");
    for (std::size_t i = 0; i < a.size(); ++i) {
      down += b[i] < a[i];
      first += a[i];
      last += b[i];
    }
    n += a.size();
  }
  const double frac = static_cast<double>(down) / static_cast<double>(n);
  return {n >= 50 && frac >= 0.9, std::to_string(n) + " images: decreasing on " + fmt("%.1f", 100 * frac) +
                                      "%, mean " + fmt("%.3f", first / n) + " -> " + fmt("%.3f", last / n)};
}

double seed_mean_accuracy(const StyleRuns& runs, const std::string& cond) {
  double s = 0.0;
  for (const auto& r : runs.reports) s += condition_accuracy(r, cond);
  return s / static_cast<double>(runs.reports.size());
}

Outcome style_ordering(const StyleRuns& runs) {
  const double clean = seed_mean_accuracy(runs, "clean"), prot = seed_mean_accuracy(runs, "protected"),
               imp = seed_mean_accuracy(runs, "impress");
  double best = 0.0;
  std::string detail;
  for (PurifyMethod b : baseline_methods()) {
    const std::string name(to_string(b));
    const double a = seed_mean_accuracy(runs, name);
    best = std::max(best, a);
    detail += " " + name + " " + fmt("%.1f", 100 * a);
  }
  const bool pass = clean - prot >= 0.20 && imp - prot >= 0.10 && imp >= best - 0.05;
  return {pass, std::to_string(runs.reports.size()) + " seeds: clean " + fmt("%.1f", 100 * clean) + ", protected " +
                    fmt("%.1f", 100 * prot) + ", impress " + fmt("%.1f", 100 * imp) + ";" + detail};
}

Outcome clean_no_harm(const StyleRuns& runs) {
  const double clean = seed_mean_accuracy(runs, "clean"), purified = seed_mean_accuracy(runs, "clean_impress");
  return {std::abs(purified - clean) <= 0.05,
          "clean " + fmt("%.1f", 100 * clean) + " vs purified clean " + fmt("%.1f", 100 * purified) + " (" +
              std::to_string(runs.reports.size()) + " seeds)"};
}

Outcome edit_ordering(const LabModels& m, const std::vector<StyledImage>& pool) {
  EditPipelineConfig c;
  std::cerr << "edit pipeline" << std::endl;
  const MetricReport r = run_edit_pipeline(m, pool, c, &std::cerr).report;
  const double psnr_i = r.mean("impress", "psnr"), psnr_p = r.mean("protected", "psnr");
  const double vif_i = r.mean("impress", "vifp"), vif_p = r.mean("protected", "vifp");
  // Ranking set of the fidelity table; lowpass and combo are reported only.
  const std::vector<std::string> ranked{"protected", "jpeg", "noise", "resize", "impress"};
  std::string lowest;
  double low = 2.0;
  std::string detail;
  for (const auto& cond : ranked) {
    const double v = r.mean(cond, "ssim");
    detail += " " + cond + " " + fmt("%.3f", v);
    if (v < low) {
      low = v;
      lowest = cond;
    }
  }
  const bool pass = psnr_i > psnr_p && vif_i > vif_p && lowest == "noise";
  return {pass, "psnr impress " + fmt("%.2f", psnr_i) + " vs protected " + fmt("%.2f", psnr_p) + ", vifp " +
                    fmt("%.3f", vif_i) + " vs " + fmt("%.3f", vif_p) + "; ssim" + detail + " (lowest: " + lowest + ")"};
}

Outcome adaptive_trend(const LabModels& m, const std::vector<StyledImage>& pool) {
  StylePipelineConfig c;
  c.protection = AttackConfig::adaptive_defaults();
  c.purify.steps = kStylePurifySteps;
  c.baselines = {};
  std::cerr << "adaptive sweep" << std::endl;
  const MetricReport r = run_ablation_sweep(m, pool, c, SweepParameter::kBetaAdapt, {1, 40, 1000}, &std::cerr);
  auto acc = [&](const char* beta, const char* cond) {
    return condition_accuracy(r, std::string("beta_adapt=") + beta + "/" + cond);
  };
  const double p1 = acc("1", "protected"), p40 = acc("40", "protected"), p1000 = acc("1000", "protected");
  const double i40 = acc("40", "impress");
  const bool degraded = p1000 - p1 >= 0.10, recovers = i40 - p40 >= 0.10;
  return {degraded && recovers,
          std::string("protected acc beta=1 ") + fmt("%.1f", 100 * p1) + ", beta=40 " + fmt("%.1f", 100 * p40) +
              ", beta=1000 " + fmt("%.1f", 100 * p1000) + " (degradation clause " + (degraded ? "holds" : "FAILS") +
              "); impress at beta=40 " + fmt("%.1f", 100 * i40) + " (recovery clause " +
              (recovers ? "holds" : "FAILS") + ")"};
}

// Criterion 10 runs a reduced pipeline pair at the start and again at the
// end of the session, from models re-read from disk, so the heap state and
// every cache differ between the two passes.
std::filesystem::path determinism_pass(const std::filesystem::path& models_dir, const std::vector<StyledImage>& pool,
                                       const std::filesystem::path& out) {
  const LabModels m = load_lab_models(models_dir);
  StylePipelineConfig s;
  s.finetune_images = 4;
  s.generations = 8;
  s.finetune.steps = 40;
  s.protection.steps = 40;
  s.purify.steps = 40;
  s.include_clean_impress = true;
  s.seed = 17;
  EditPipelineConfig e;
  e.images = 3;
  e.protection.steps = 10;
  e.purify.steps = 40;
  e.seed = 17;
  const MetricReport a = run_style_pipeline(m, pool, s).report;
  const MetricReport b = run_edit_pipeline(m, pool, e).report;
  emit_report({a, b}, out);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome compare_dirs(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::set<std::string> names;
  for (const auto& dir : {a, b}) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) names.insert(e.path().filename().string());
  }
  std::size_t same = 0;
  std::string differ;
  for (const auto& n : names) {
    if (std::filesystem::exists(a / n) && std::filesystem::exists(b / n) && slurp(a / n) == slurp(b / n)) {
      ++same;
    } else {
      differ += " " + n;
    }
  }
  return {differ.empty() && same >= 5,
          std::to_string(same) + "/" + std::to_string(names.size()) + " files byte-identical across re-runs" +
              (differ.empty() ? "" : " (differ:" + differ + ")")};
}

}  // namespace
}  // namespace purlab

int main(int argc, char** argv) {
  using namespace purlab;
  CLI::App app{"purlab acceptance run"};
  std::string models_dir, work_dir, only;
  bool prepare = false;
  app.add_option("--models", models_dir, "lab model directory")->required();
  app.add_option("--work", work_dir, "scratch directory (default: <models>/../acceptance_work)");
  app.add_option("--only", only, "comma-separated criteria to run");
  app.add_flag("--prepare", prepare, "train or reuse the lab models, then exit");
  CLI11_PARSE(app, argc, argv);

  const LabConfig lab;
  try {
    if (prepare) {
      ensure_lab_models(lab, models_dir, &std::cerr);
      return 0;
    }
  } catch (const GateError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }

  std::set<int> wanted;
  if (only.empty()) {
    for (int i = 1; i <= 10; ++i) wanted.insert(i);
  } else {
    std::stringstream ss(only);
    for (std::string tok; std::getline(ss, tok, ',');) wanted.insert(std::stoi(tok));
  }
  const std::filesystem::path work =
      work_dir.empty() ? std::filesystem::path(models_dir).parent_path() / "acceptance_work" : std::filesystem::path(work_dir);
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  ::setenv("SOURCE_DATE_EPOCH", "1767225600", 1);

  const LabModels m = load_lab_models(models_dir);
  const auto pool = pool_for(lab);
  const bool det = wanted.count(10) > 0;
  if (det) {
    std::cerr << "determinism: first pass" << std::endl;
    determinism_pass(models_dir, pool, work / "rerun_a");
  }

  const char* names[] = {"",
                         "gradient correctness",
                         "metric identities",
                         "attack constraint exactness",
                         "consistency gap",
                         "latent trajectory trend",
                         "style-mimicking ordering",
                         "editing-fidelity ordering",
                         "clean no-harm",
                         "adaptive-protection trend",
                         "determinism"};
  std::optional<StyleRuns> style_runs;
  auto style = [&]() -> const StyleRuns& {
    if (!style_runs) style_runs = run_style(m, pool);
    return *style_runs;
  };
  int failed = 0, ran = 0;
  for (int k : wanted) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      switch (k) {
        case 1: o = gradients(m); break;
        case 2: o = metric_identities(m, pool); break;
        case 3: o = attack_constraints(m, pool); break;
        case 4: o = consistency_gap(style()); break;
        case 5: o = latent_trend(style()); break;
        case 6: o = style_ordering(style()); break;
        case 7: o = edit_ordering(m, pool); break;
        case 8: o = clean_no_harm(style()); break;
        case 9: o = adaptive_trend(m, pool); break;
        case 10:
          std::cerr << "determinism: second pass" << std::endl;
          determinism_pass(models_dir, pool, work / "rerun_b");
          o = compare_dirs(work / "rerun_a", work / "rerun_b");
          break;
        default: o = {false, "no such criterion"};
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", k, k < 11 && k > 0 ? names[k] : "?",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
    ++ran;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed ? 3 : 0;
}
