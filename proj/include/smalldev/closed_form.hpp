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

#include <cmath>

namespace smalldev {

/// 4(2 sqrt 3 - 3)/9, the leading constant of the (1,2,4) closed form.
inline const double kClosedFormConstant = 4.0 * (2.0 * std::sqrt(3.0) - 3.0) / 9.0;

struct ClosedFormF2 {
  double value;  // lower bound on Prob[Z < 0]
  double v;      // maximizing v
};

/// Exact MP(1,2,4) bound: max over v in [0.1, 100] of
/// c * (-2 M1 / v + 3 M2 / v^2 - B4 / v^4).
ClosedFormF2 closed_form_f2(double xi, double D);

/// The explicit relaxation with v = sqrt(2 B4 / (3 M2)). Always below
/// closed_form_f2 at the same (xi, D).
double f3(double xi, double D);

}  // namespace smalldev
