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

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "purlab/autodiff/gradcheck.hpp"
#include "purlab/autodiff/ops.hpp"
#include "purlab/metrics/metrics.hpp"

namespace purlab {
namespace {

using testing::random_image;
using testing::smooth_image;

Image add_noise(const Image& x, double sd, std::uint64_t seed) {
  Rng rng(seed);
  Image y = x;
  for (double& p : y.pixels()) p = std::clamp(p + sd * rng.normal(), -1.0, 1.0);
  return y;
}

// Direct windowed SSIM: 2-D Gaussian weights summed per valid position.
double naive_ssim(const Image& a, const Image& b) {
  const int n = 11;
  std::vector<double> w(n * n);
  double total = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      total += w[y * n + x] = std::exp(-((y - 5) * (y - 5) + (x - 5) * (x - 5)) / (2 * 1.5 * 1.5));
    }
  }
  for (double& v : w) v /= total;
  const double c1 = 1e-4, c2 = 9e-4;
  double sum = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    double acc = 0.0;
    int count = 0;
    for (int oy = 0; oy + n <= 32; ++oy) {
      for (int ox = 0; ox + n <= 32; ++ox) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            const double pa = (a.at(c, oy + y, ox + x) + 1) / 2, pb = (b.at(c, oy + y, ox + x) + 1) / 2;
            const double k = w[y * n + x];
            ma += k * pa;
            mb += k * pb;
            saa += k * pa * pa;
            sbb += k * pb * pb;
            sab += k * pa * pb;
          }
        }
        const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
        acc += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
    sum += acc / count;
  }
  return sum / 3.0;
}

TEST(Psnr, MatchesHandMse) {
  const Image a = random_image(1), b = random_image(2);
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a.pixels()[i] - b.pixels()[i]) / 2.0;
    se += d * d;
  }
  EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(1.0 / (se / a.size())), 1e-9);
  EXPECT_EQ(psnr(a, a), kPsnrCap);
  // A uniform offset of 0.2 in [-1,1] is 0.1 in [0,1]: exactly 20 dB.
  Image c = Image(3, 32, 32, 0.0), d = Image(3, 32, 32, 0.2);
  EXPECT_NEAR(psnr(c, d), 20.0, 1e-9);
}

TEST(Ssim, IdentityAndOracle) {
  const Image a = smooth_image(3);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Image b = add_noise(a, 0.1 * (s + 1), 10 + s);
    EXPECT_NEAR(ssim(a, b), naive_ssim(a, b), 1e-10);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
  }
}

TEST(Ssim, DecreasesWithNoise) {
  const Image a = smooth_image(4);
  double last = 1.0;
  for (double sd : {0.02, 0.1, 0.3}) {
    const double v = ssim(a, add_noise(a, sd, 5));
    EXPECT_LT(v, last);
    last = v;
  }
}

TEST(Vifp, IdentityAndMonotoneInNoise) {
  const Image a = smooth_image(6);
  EXPECT_NEAR(vifp(a, a), 1.0, 1e-9);
  double last = 1.0;
  for (double sd : {0.02, 0.1, 0.3}) {
    const double v = vifp(a, add_noise(a, sd, 7));
    EXPECT_LT(v, last);
    EXPECT_GE(v, 0.0);
    last = v;
  }
}

TEST(Vifp, FlatReferenceIsDegenerate) {
  const Image flat(3, 32, 32, 0.3);
  const VifpResult r = vifp_detailed(flat, flat);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(vifp_detailed(smooth_image(8), smooth_image(8)).degenerate);
}

TEST(Metrics, ShapeMismatchThrows) {
  const Image a = random_image(1);
  const Image small(3, 16, 16);
  EXPECT_THROW(psnr(a, small), ShapeError);
  EXPECT_THROW(ssim(a, small), ShapeError);
  EXPECT_THROW(vifp(a, small), ShapeError);
}

class FeatureMetrics : public ::testing::Test {
 protected:
  Rng rng{9};
  Autoencoder ae{rng};
  FeatureNet net{4, rng};
};

TEST_F(FeatureMetrics, LpipsIdentitySymmetryAndGrowth) {
  const Image a = smooth_image(10), b = add_noise(a, 0.1, 11);
  EXPECT_EQ(lpips_proxy(net, a, a), 0.0);
  EXPECT_EQ(lpips_proxy(net, a, b), lpips_proxy(net, b, a));
  EXPECT_GT(lpips_proxy(net, a, b), 0.0);
  EXPECT_LT(lpips_proxy(net, a, add_noise(a, 0.02, 12)), lpips_proxy(net, a, add_noise(a, 0.3, 12)));
}

TEST_F(FeatureMetrics, LpipsGradientMatchesCentralDifferences) {
  // Gradient through a random 8-dimensional slice of the image.
  const Tensor ref = smooth_image(13).to_tensor();
  const Tensor basis = testing::random_tensor({3 * 32 * 32, 8}, 14, -0.05, 0.05);
  auto f = [&](const Tensor& c) {
    const Tensor x = ops::add(ref, ops::reshape(ops::matmul(basis, ops::reshape(c, {8, 1})), {3, 32, 32}));
    return lpips_proxy(net, ref, x);
  };
  EXPECT_LT(finite_difference_check(f, testing::random_tensor({8}, 15)), 1e-5);
}

TEST_F(FeatureMetrics, ConsistencyIsReconstructionMse) {
  const Image x = smooth_image(16);
  NoGradGuard g;
  const Tensor t = x.to_tensor();
  const Tensor r = ae.reconstruct(t);
  double se = 0.0;
  for (std::size_t i = 0; i < t.numel(); ++i) se += (r[i] - t[i]) * (r[i] - t[i]);
  EXPECT_NEAR(consistency_loss(ae, x), se / t.numel(), 1e-15);
}

TEST_F(FeatureMetrics, LatentDistanceStartsAtZeroForTheCleanImage) {
  const Image x = smooth_image(17);
  const auto d = latent_distance_trajectory(ae, x, {x, add_noise(x, 0.1, 18), add_noise(x, 0.4, 18)});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_GT(d[1], 0.0);
  EXPECT_LT(d[1], d[2]);
  EXPECT_TRUE(latent_distance_trajectory(ae, x, {}).empty());
}

}  // namespace
}  // namespace purlab
