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

#include "smalldev/closed_form.hpp"

#include <algorithm>

#include "smalldev/error.hpp"
#include "smalldev/model.hpp"
#include "smalldev/numerics.hpp"

namespace smalldev {

ClosedFormF2 closed_form_f2(double xi, double D) {
  require(xi > 0 && xi <= 1 && D > 0, "closed_form_f2: need xi in (0, 1] and D > 0");
  const ShiftedMoments m = shifted_moments(xi, D);
  auto objective = [&](double v) {
    const double v2 = v * v;
    return kClosedFormConstant * (-2.0 * m.M1 / v + 3.0 * m.M2 / v2 - m.B4 / (v2 * v2));
  };
  const auto best = numerics::maximize_scalar(objective, 0.1, 100.0, numerics::Tolerances{}.scalar_opt_tol);
  return {best.value, best.x};
}

double f3(double xi, double D) {
  require(xi > 0 && xi <= 1 && D > 0, "f3: need xi in (0, 1] and D > 0");
  const double x2 = xi * xi;
  const double x4 = x2 * x2;
  const double s = std::max({5.0, 1.0 / x2 - 4.0 / xi, 1.0 / x2 - 8.0 / xi + 5.0});
  const double den = 3.0 * D * D + (6.0 + s) * D * x2 + x4;
  return kClosedFormConstant *
         (std::sqrt(6.0 * (D * x2 + x4) / den) + 2.25 * (D + x2) * (D + x2) / den);
}

}  // namespace smalldev
