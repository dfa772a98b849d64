// Copyright 2026 The smalldev Authors.
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

namespace smalldev::numerics {

struct Tolerances {
  double abs_fn_tol = 1e-10;      // standard normal CDF accuracy target
  double bisect_x_tol = 1e-7;     // bracket width for crossing searches
  double scalar_opt_tol = 1e-9;   // golden-section termination width
};

/// Standard normal CDF. Absolute error well below 1e-10 everywhere.
/// Throws Error(kDomain) for NaN or infinite input.
double std_normal_cdf(double x);

struct ScalarMax {
  double x;
  double value;
};

/// Maximizes f over [lo, hi]: a 200-point grid locates the best cell, then
/// golden-section search refines it until the bracket is narrower than tol.
ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo,
                          double hi, double tol);

/// Root of a monotone g on [lo, hi] by bisection. g(lo) and g(hi) must have
/// opposite signs (Error(kNoIntersection) otherwise) and g must look
/// monotone on a coarse sample (Error(kArgument) otherwise). The returned
/// point is the midpoint of a final bracket no wider than tol.
double bisect_crossing(const std::function<double(double)>& g, double lo,
                       double hi, double tol);

}  // namespace smalldev::numerics
