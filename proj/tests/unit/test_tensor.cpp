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

#include "helpers.hpp"
#include "purlab/autodiff/gradcheck.hpp"
#include "purlab/autodiff/ops.hpp"
#include "purlab/autodiff/tensor.hpp"

namespace purlab {
namespace {

using testing::random_tensor;

TEST(Tensor, FactoriesCheckShapes) {
  EXPECT_THROW(Tensor::from({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor::zeros({3, 0}), ShapeError);
  const Tensor s = Tensor::scalar(2.5);
  EXPECT_EQ(s.rank(), 0u);
  EXPECT_EQ(s.numel(), 1u);
  EXPECT_DOUBLE_EQ(s.item(), 2.5);
  EXPECT_THROW(Tensor::zeros({2}).item(), ShapeError);
  EXPECT_THROW(Tensor().shape(), std::logic_error);
}

TEST(Tensor, BackwardNeedsScalar) {
  const Tensor x = random_tensor({3}, 1, -1, 1, true);
  EXPECT_THROW(ops::square(x).backward(), ShapeError);
}

TEST(Tensor, GradientsAccumulateAcrossBackwardCalls) {
  Tensor x = Tensor::from({2}, {1.0, -2.0}, true);
  ops::sum(ops::square(x)).backward();
  ops::sum(ops::square(x)).backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], -8.0);
  x.zero_grad();
  EXPECT_FALSE(x.has_grad());
}

TEST(Tensor, SharedSubexpressionGetsBothAdjoints) {
  Tensor x = Tensor::from({1}, {3.0}, true);
  const Tensor y = ops::mul(x, x);
  ops::sum(ops::add(y, y)).backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 12.0);
}

TEST(Tensor, NoGradGuardRecordsNothing) {
  const Tensor x = random_tensor({4}, 2, -1, 1, true);
  {
    NoGradGuard guard;
    EXPECT_FALSE(grad_enabled());
    const Tensor y = ops::square(x);
    EXPECT_FALSE(y.requires_grad());
    EXPECT_TRUE(y.is_leaf());
  }
  EXPECT_TRUE(grad_enabled());
}

TEST(Tensor, DetachCutsTheGraph) {
  Tensor x = Tensor::from({1}, {2.0}, true);
  const Tensor y = ops::mul(ops::square(x).detach(), x);
  ops::sum(y).backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
}

TEST(Tensor, MutableDataOnlyOnLeaves) {
  Tensor x = random_tensor({2}, 3, -1, 1, true);
  Tensor y = ops::square(x);
  EXPECT_THROW(y.mutable_data(), std::logic_error);
  EXPECT_NO_THROW(x.mutable_data());
}

TEST(Tensor, SetGradChecksSize) {
  Tensor x = Tensor::zeros({3}, true);
  const std::vector<double> bad{1.0, 2.0};
  EXPECT_THROW(x.set_grad(bad), ShapeError);
  const std::vector<double> good{1.0, 2.0, 3.0};
  x.set_grad(good);
  EXPECT_DOUBLE_EQ(x.grad()[2], 3.0);
}

TEST(Tape, OrderIsDeterministicAndTopological) {
  const Tensor a = random_tensor({3}, 4, -1, 1, true);
  const Tensor b = random_tensor({3}, 5, -1, 1, true);
  const Tensor loss = ops::sum(ops::mul(ops::tanh(a), ops::add(a, b)));
  const Tape t1 = Tape::record(loss);
  const Tape t2 = Tape::record(loss);
  EXPECT_EQ(t1.ops(), t2.ops());
  EXPECT_EQ(t1.ops().back(), "sum");
  EXPECT_EQ(t1.size(), 6u);
}

TEST(Tape, InteriorAdjointsAreReleased) {
  Tensor x = random_tensor({3}, 6, -1, 1, true);
  const Tensor y = ops::square(x);
  ops::sum(y).backward();
  EXPECT_FALSE(y.has_grad());
  EXPECT_TRUE(x.has_grad());
}

TEST(Gradcheck, RejectsBadStepAndNaN) {
  const Tensor x = random_tensor({2}, 7);
  auto f = [](const Tensor& t) { return ops::sum(ops::square(t)); };
  EXPECT_THROW(finite_difference_check(f, x, 1e-2), std::invalid_argument);
  auto g = [](const Tensor& t) { return ops::sum(ops::sqrt(ops::add_scalar(t, -5.0))); };
  EXPECT_THROW(finite_difference_check(g, x), std::domain_error);
}

TEST(Gradcheck, DetectsAWrongGradient) {
  // detach() inside f hides part of the dependence from backward().
  const Tensor x = random_tensor({3}, 8, 0.5, 1.0);
  auto f = [](const Tensor& t) { return ops::sum(ops::mul(t, t.detach())); };
  EXPECT_GT(finite_difference_check(f, x), 0.1);
}

}  // namespace
}  // namespace purlab
