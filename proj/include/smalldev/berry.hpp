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

namespace smalldev {

/// Best known Berry-Esseen constant.
inline constexpr double kBerryEsseenC0 = 0.56;

struct BerryEsseenParams {
  double c0 = kBerryEsseenC0;

  /// Every published number assumes 0.56; anything else is an experiment.
  static BerryEsseenParams unsafe_constant(double c0) { return BerryEsseenParams{c0}; }
};

/// min(1, 1/2 + c0 K / sqrt(D)): upper bound on Prob[sum >= 0].
double generic_upper(double K, double D, BerryEsseenParams params = {});

/// Phi(xi / sqrt(D)) - c0 / sqrt(D), clamped to [0, 1]. Lower bound on
/// Prob[sum Y <= xi] when every |Y_i| <= 1.
double f1(double xi, double D, BerryEsseenParams params = {});

/// Phi(xi / sqrt(D)) - c0 T_B / D^{3/2}, clamped to [0, 1]. Requires
/// 0 <= T_B <= D.
double f1_hat(double xi, double D, double T_B, BerryEsseenParams params = {});

}  // namespace smalldev
