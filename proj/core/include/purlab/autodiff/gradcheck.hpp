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

#include <functional>

#include "purlab/autodiff/tensor.hpp"

namespace purlab {

using ScalarFn = std::function<Tensor(const Tensor&)>;

/// Max over coordinates of |analytic - central| / (|analytic| + |central| + 1e-8)
/// where analytic comes from backward() and central from f(x +- h e_i).
/// h must lie in [1e-6, 1e-3]; a NaN in f(x) is rejected.
double finite_difference_check(const ScalarFn& f, const Tensor& x, double h = 1e-5);

}  // namespace purlab
