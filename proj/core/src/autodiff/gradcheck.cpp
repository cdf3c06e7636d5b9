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

#include "purlab/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace purlab {

double finite_difference_check(const ScalarFn& f, const Tensor& x, double h) {
  if (h < 1e-6 || h > 1e-3) throw std::invalid_argument("finite difference step must lie in [1e-6, 1e-3]");

  Tensor leaf = x.clone(true);
  Tensor y = f(leaf);
  if (y.numel() != 1) throw ShapeError("finite_difference_check: f must be scalar-valued");
  if (std::isnan(y.item())) throw std::domain_error("finite_difference_check: f(x) is NaN");
  std::vector<double> analytic(leaf.numel(), 0.0);
  if (y.requires_grad()) {
    y.backward();
    if (leaf.has_grad()) {
      auto g = leaf.grad();
      analytic.assign(g.begin(), g.end());
    }
  }

  NoGradGuard no_grad;
  Tensor probe = x.clone(false);
  auto w = probe.mutable_data();
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + h;
    const double fp = f(probe).item();
    w[i] = orig - h;
    const double fm = f(probe).item();
    w[i] = orig;
    const double central = (fp - fm) / (2.0 * h);
    const double err = std::abs(analytic[i] - central) / (std::abs(analytic[i]) + std::abs(central) + 1e-8);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace purlab
