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

#include <cstddef>
#include <string>
#include <vector>

namespace smalldev {

/// Mean-zero two-point variable: -a with probability b/(a+b), +b with
/// probability a/(a+b). a == b == 0 is the constant 0.
struct TwoPointVar {
  double a = 0.0;
  double b = 0.0;

  double prob_neg() const { return a + b > 0 ? b / (a + b) : 1.0; }
  double prob_pos() const { return a + b > 0 ? a / (a + b) : 0.0; }
  bool degenerate() const { return a + b <= 0; }
};

/// Independent two-point variables bounded to [-xi, 1].
struct Instance {
  double xi = 0.2;
  std::vector<TwoPointVar> vars;

  /// Throws Error(kArgument) unless 0 < xi <= 1 and every var lies in
  /// [0, xi] x [0, 1] (up to a 1e-12 relative rounding allowance).
  void validate() const;
};

struct InstanceStats {
  double D = 0.0;    // variance of the sum
  double T_B = 0.0;  // sum of third absolute moments
  double T_M = 0.0;  // sum a*b*(a - b) = -(sum of third moments)
};

InstanceStats stats(const Instance& instance);

/// max of a^2 + b^2 - 4ab - 4 xi (b - a) over [0, xi] x [0, 1]. The function
/// is convex in each coordinate, so the four corners suffice.
double s_of_xi(double xi);

/// How the third-moment lower bound is derived.
struct M3Mode {
  enum class Kind { kBasic, kRefined };
  Kind kind = Kind::kBasic;
  double s = 1.0;  // T_B = s * D, only meaningful for kRefined

  static M3Mode basic() { return {}; }
  static M3Mode refined(double s) { return {Kind::kRefined, s}; }
};

/// Moment data of Z = Y - xi, Y = sum of the instance.
struct ShiftedMoments {
  double M1 = 0.0;
  double M2 = 0.0;
  double L3 = 0.0;  // E[Z^3] >= L3
  double B4 = 0.0;  // E[Z^4] <= B4
  double xi = 0.0;
  double D = 0.0;
};

ShiftedMoments shifted_moments(double xi, double D, M3Mode mode = M3Mode::basic());

struct Partition {
  std::vector<std::size_t> A;  // original indices of the truncated group
  std::vector<std::size_t> B;  // original indices that survive, rescaled
  double a_sum = 0.0;
  Instance transformed;        // xi = 1/tau, vars in B's order
};

/// Raw mean-zero two-point variable -a / +b with 0 < a <= 1, b > 0.
struct RawTwoPoint {
  double a = 0.0;
  double b = 0.0;
};

/// Splits off the variables with very large upside and rescales the rest
/// into [-1/tau, 1]. Ties in b break by original index.
Partition truncate_partition(const std::vector<RawTwoPoint>& raw, double tau);

std::string instance_to_json(const Instance& instance);
/// Throws Error(kArgument) on malformed documents or invalid instances.
Instance instance_from_json(const std::string& text);

}  // namespace smalldev
