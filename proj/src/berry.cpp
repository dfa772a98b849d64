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

#include "smalldev/berry.hpp"

#include <algorithm>
#include <cmath>

#include "smalldev/error.hpp"
#include "smalldev/numerics.hpp"

namespace smalldev {

double generic_upper(double K, double D, BerryEsseenParams params) {
  require(K > 0 && D > 0, "generic_upper: need K > 0 and D > 0");
  return std::min(1.0, 0.5 + params.c0 * K / std::sqrt(D));
}

double f1(double xi, double D, BerryEsseenParams params) {
  require(xi > 0 && xi <= 1 && D > 0, "f1: need xi in (0, 1] and D > 0");
  // |Y_i| <= 1 gives T_B <= D; f1 is the T_B = D case.
  return f1_hat(xi, D, D, params);
}

double f1_hat(double xi, double D, double T_B, BerryEsseenParams params) {
  require(xi > 0 && xi <= 1 && D > 0, "f1_hat: need xi in (0, 1] and D > 0");
  require(T_B >= 0, "f1_hat: T_B must be nonnegative");
  if (T_B > D * (1.0 + 1e-12)) fail(ErrorCode::kArgument, "f1_hat: T_B > D is outside the |Y| <= 1 regime");
  const double sd = std::sqrt(D);
  return std::clamp(numerics::std_normal_cdf(xi / sd) - params.c0 * T_B / (D * sd), 0.0, 1.0);
}

}  // namespace smalldev
