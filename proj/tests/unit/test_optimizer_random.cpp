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

#include <cmath>
#include <set>

#include "purlab/autodiff/ops.hpp"
#include "purlab/autodiff/optimizer.hpp"
#include "purlab/autodiff/random.hpp"

namespace purlab {
namespace {

TEST(Optimizer, SgdStepIsLearningRateTimesGradient) {
  std::vector<Tensor> p{Tensor::from({2}, {1.0, -1.0}, true)};
  ops::sum(ops::square(p[0])).backward();
  Optimizer opt({OptimizerKind::kSgd, 0.1});
  opt.step(p);
  EXPECT_DOUBLE_EQ(p[0][0], 0.8);
  EXPECT_DOUBLE_EQ(p[0][1], -0.8);
  EXPECT_EQ(opt.step_count(), 1);
}

TEST(Optimizer, AdamMatchesHandComputedMoments) {
  // Three steps on f(x) = x^2 from x = 1, tracked with scalar arithmetic.
  const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double x = 1.0, m = 0.0, v = 0.0;
  std::vector<Tensor> p{Tensor::from({1}, {1.0}, true)};
  Optimizer opt({OptimizerKind::kAdam, lr, b1, b2, eps});
  for (int t = 1; t <= 3; ++t) {
    const double g = 2.0 * x;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    x -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    opt.zero_grad(p);
    ops::sum(ops::square(p[0])).backward();
    opt.step(p);
    EXPECT_NEAR(p[0][0], x, 1e-12) << "step " << t;
  }
}

TEST(Optimizer, FirstAdamStepHasLearningRateMagnitude) {
  std::vector<Tensor> p{Tensor::from({3}, {0.5, -2.0, 3.0}, true)};
  ops::sum(ops::scale(ops::square(p[0]), 7.0)).backward();
  Optimizer opt({OptimizerKind::kAdam, 0.01});
  opt.step(p);
  EXPECT_NEAR(p[0][0], 0.49, 1e-9);
  EXPECT_NEAR(p[0][1], -1.99, 1e-9);
  EXPECT_NEAR(p[0][2], 2.99, 1e-9);
}

TEST(Optimizer, MissingGradientIsAnError) {
  std::vector<Tensor> p{Tensor::zeros({2}, true)};
  Optimizer opt({OptimizerKind::kSgd, 0.1});
  EXPECT_THROW(opt.step(p), std::exception);
}

TEST(Optimizer, ParsesKinds) {
  EXPECT_EQ(parse_optimizer_kind("adam"), OptimizerKind::kAdam);
  EXPECT_EQ(parse_optimizer_kind("sgd"), OptimizerKind::kSgd);
  EXPECT_THROW(parse_optimizer_kind("lbfgs"), std::invalid_argument);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Rng, SubstreamIgnoresConsumedState) {
  Rng a(7), b(7);
  for (int i = 0; i < 13; ++i) b.uniform();
  Rng sa = a.substream("x"), sb = b.substream("x");
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sa.uniform(), sb.uniform());
  EXPECT_NE(a.substream("x").uniform(), a.substream("y").uniform());
  EXPECT_NE(a.substream(std::uint64_t{1}).uniform(), a.substream(std::uint64_t{2}).uniform());
}

TEST(Rng, UniformIndexCoversRange) {
  Rng r(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 500; ++i) {
    const std::size_t k = r.uniform_index(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, NormalMoments) {
  Rng r(5);
  const auto v = r.normals(20000, 2.0);
  double m = 0, s = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  s = std::sqrt(s / v.size());
  EXPECT_NEAR(m, 0.0, 0.05);
  EXPECT_NEAR(s, 2.0, 0.05);
}

TEST(Rng, MixSeedSpreadsNeighbours) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(0, 1), mix_seed(1, 0));
  EXPECT_EQ(hash_label("abc"), hash_label("abc"));
  EXPECT_NE(hash_label("abc"), hash_label("abd"));
}

}  // namespace
}  // namespace purlab
