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

#include "helpers.hpp"
#include "purlab/autodiff/ops.hpp"
#include "purlab/diffusion/diffusion.hpp"

namespace purlab {
namespace {

TEST(Schedule, MatchesRunningProductOracle) {
  const NoiseSchedule s = make_schedule(100, 1e-4, 0.02);
  double prod = 1.0;
  for (std::size_t t = 1; t <= 100; ++t) {
    const double beta = 1e-4 + (0.02 - 1e-4) * static_cast<double>(t - 1) / 99.0;
    prod *= 1.0 - beta;
    EXPECT_NEAR(s.beta(t), beta, 1e-15);
    EXPECT_NEAR(s.alpha_bar(t), prod, 1e-14);
  }
  EXPECT_NEAR(s.alpha_bar(100), 0.363563, 1e-6);
}

TEST(Schedule, SingleStepAndMonotone) {
  const NoiseSchedule one = make_schedule(1, 0.3, 0.5);
  EXPECT_DOUBLE_EQ(one.alpha_bar(0), 1.0);
  EXPECT_DOUBLE_EQ(one.alpha_bar(1), 0.7);
  const NoiseSchedule s = make_schedule();
  for (std::size_t t = 1; t <= s.steps(); ++t) {
    EXPECT_GT(s.beta(t), 0.0);
    EXPECT_LT(s.beta(t), 1.0);
    EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
  }
}

TEST(Schedule, RejectsBadBounds) {
  EXPECT_THROW(make_schedule(0, 1e-4, 0.02), std::invalid_argument);
  EXPECT_THROW(make_schedule(10, 0.0, 0.02), std::invalid_argument);
  EXPECT_THROW(make_schedule(10, 0.03, 0.02), std::invalid_argument);
  EXPECT_THROW(make_schedule(10, 1e-4, 1.0), std::invalid_argument);
  EXPECT_THROW(make_schedule(10, 1e-4, 0.02).beta(11), std::out_of_range);
}

TEST(QSample, ClosedForm) {
  const NoiseSchedule s = make_schedule();
  const Tensor z = testing::random_tensor({4, 8, 8}, 1);
  const Tensor e = testing::random_tensor({4, 8, 8}, 2);
  const Tensor zt = q_sample(s, z, 37, e);
  const double a = s.alpha_bar(37);
  for (std::size_t i = 0; i < z.numel(); ++i) {
    EXPECT_NEAR(zt[i], std::sqrt(a) * z[i] + std::sqrt(1 - a) * e[i], 1e-14);
  }
  const Tensor z0 = q_sample(s, z, 0, e);
  for (std::size_t i = 0; i < z.numel(); ++i) EXPECT_EQ(z0[i], z[i]);
}

TEST(Sampler, TimestepsAreEvenAndEndAtZero) {
  const auto ts = sampler_timesteps(60, 12);
  ASSERT_EQ(ts.size(), 13u);
  EXPECT_EQ(ts.front(), 60u);
  EXPECT_EQ(ts.back(), 0u);
  for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_EQ(ts[i - 1] - ts[i], 5u);
  const auto few = sampler_timesteps(3, 20);
  EXPECT_EQ(few, (std::vector<std::size_t>{3, 2, 1, 0}));
}

TEST(Sampler, StrengthMapping) {
  Rng rng(3);
  const Autoencoder ae(rng);
  const Denoiser den(100, rng);
  const LatentDiffusion ldm{ae, den, make_schedule()};
  const SamplerConfig c = ldm.sampler_for(0.6);
  EXPECT_EQ(c.start_t, 60u);
  EXPECT_EQ(c.steps, 12u);
  EXPECT_EQ(ldm.sampler_for(1.0).start_t, 100u);
  EXPECT_EQ(ldm.sampler_for(0.001).start_t, 1u);
  EXPECT_EQ(ldm.sampler_for(0.001).steps, 1u);
}

TEST(Ddim, SingleStepMatchesHandUpdate) {
  Rng rng(4);
  const Denoiser den(100, rng);
  const NoiseSchedule s = make_schedule();
  const Tensor z = testing::random_tensor({4, 8, 8}, 5);
  const Tensor out = ddim_reverse(s, den, z, {1, 40, 0});
  const Tensor e = den.predict(z, 40);
  const double a = s.alpha_bar(40);
  for (std::size_t i = 0; i < z.numel(); ++i) {
    EXPECT_NEAR(out[i], (z[i] - std::sqrt(1 - a) * e[i]) / std::sqrt(a), 1e-12);
  }
}

TEST(Ddim, TwoStepsMatchHandUpdate) {
  Rng rng(6);
  const Denoiser den(100, rng);
  const NoiseSchedule s = make_schedule();
  const Tensor z = testing::random_tensor({4, 8, 8}, 7);
  const Tensor out = ddim_reverse(s, den, z, {2, 50, 0});
  const double at = s.alpha_bar(50), as = s.alpha_bar(25);
  const Tensor e1 = den.predict(z, 50);
  std::vector<double> mid(z.numel());
  for (std::size_t i = 0; i < z.numel(); ++i) {
    const double x0 = (z[i] - std::sqrt(1 - at) * e1[i]) / std::sqrt(at);
    mid[i] = std::sqrt(as) * x0 + std::sqrt(1 - as) * e1[i];
  }
  const Tensor zm = Tensor::from(z.shape(), mid);
  const Tensor e2 = den.predict(zm, 25);
  for (std::size_t i = 0; i < z.numel(); ++i) {
    EXPECT_NEAR(out[i], (mid[i] - std::sqrt(1 - as) * e2[i]) / std::sqrt(as), 1e-11);
  }
}

TEST(Ddim, ValidatesConfiguration) {
  Rng rng(8);
  const Denoiser den(100, rng);
  const Tensor z = testing::random_tensor({4, 8, 8}, 9);
  EXPECT_THROW(ddim_reverse(make_schedule(), den, z, {10, 101, 0}), std::invalid_argument);
  EXPECT_THROW(ddim_reverse(make_schedule(), den, z, {10, 50, 11}), std::invalid_argument);
  EXPECT_THROW(ddim_reverse(make_schedule(50, 1e-4, 0.1), den, z, {10, 50, 0}), std::invalid_argument);
}

TEST(Ddim, FullTruncationEqualsUntruncatedGradient) {
  Rng rng(10);
  const Denoiser den(100, rng);
  const NoiseSchedule s = make_schedule();
  auto grad_with = [&](std::size_t k) {
    Tensor z = testing::random_tensor({4, 8, 8}, 11, -1, 1, true);
    ops::sum(ops::square(ddim_reverse(s, den, z, {4, 40, k}))).backward();
    return std::vector<double>(z.grad().begin(), z.grad().end());
  };
  const auto full = grad_with(0);
  const auto all = grad_with(4);
  const auto last = grad_with(1);
  double diff = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    EXPECT_EQ(full[i], all[i]);
    diff = std::max(diff, std::abs(full[i] - last[i]));
  }
  EXPECT_GT(diff, 0.0);
}

class EditTest : public ::testing::Test {
 protected:
  Rng rng{12};
  Autoencoder ae{rng};
  Denoiser den{100, rng};
  LatentDiffusion ldm{ae, den, make_schedule()};
};

TEST_F(EditTest, FullMaskReturnsTheReconstruction) {
  const Image x = testing::smooth_image(13);
  const EditMask keep(32 * 32, 1.0);
  const Image edited = edit_image(ldm, x, keep, 0.6, std::uint64_t{14});
  NoGradGuard g;
  const Image rec = Image::from_tensor(ae.reconstruct(x.to_tensor()));
  EXPECT_LE(max_abs_diff(edited, rec), 1e-9);
}

TEST_F(EditTest, EmptyMaskAtFullStrengthIgnoresTheInput) {
  const EditMask none(32 * 32, 0.0);
  const Image a = edit_image(ldm, testing::smooth_image(15), none, 1.0, std::uint64_t{16});
  const Image b = edit_image(ldm, testing::smooth_image(17), none, 1.0, std::uint64_t{16});
  EXPECT_EQ(a, b);
}

TEST_F(EditTest, SeededEditsAreDeterministic) {
  const Image x = testing::smooth_image(18);
  const EditMask m = centered_square_mask(0.25);
  EXPECT_EQ(edit_image(ldm, x, m, 0.6, std::uint64_t{19}), edit_image(ldm, x, m, 0.6, std::uint64_t{19}));
  EXPECT_EQ(reconstruct_ldm(ldm, x, 0.6, 20), reconstruct_ldm(ldm, x, 0.6, 20));
  EXPECT_NE(reconstruct_ldm(ldm, x, 0.6, 20), reconstruct_ldm(ldm, x, 0.6, 21));
}

TEST(EditMask, CenteredSquareAndLatentSampling) {
  const EditMask m = centered_square_mask(0.25);
  double ones = 0.0;
  for (double v : m) ones += v;
  EXPECT_EQ(ones, 256.0);
  EXPECT_EQ(m[8 * 32 + 8], 1.0);
  EXPECT_EQ(m[7 * 32 + 8], 0.0);
  const auto lm = latent_mask(m);
  ASSERT_EQ(lm.size(), 4u * 64u);
  double kept = 0.0;
  for (double v : lm) kept += v;
  EXPECT_EQ(kept, 4.0 * 16.0);
  EXPECT_EQ(lm[2 * 8 + 2], 1.0);
  EXPECT_EQ(lm[1 * 8 + 2], 0.0);
  EXPECT_THROW(latent_mask(EditMask(10, 1.0)), ShapeError);
  EXPECT_THROW(centered_square_mask(1.5), std::invalid_argument);
}

TEST(LatentNoise, SeededStandardNormal) {
  const Tensor a = latent_noise(5);
  EXPECT_EQ(a.shape(), (Shape{4, 8, 8}));
  const Tensor b = latent_noise(5);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a[i], b[i]);
}

}  // namespace
}  // namespace purlab
