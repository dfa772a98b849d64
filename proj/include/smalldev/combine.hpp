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
#include <string>
#include <vector>

#include "smalldev/moment_sdp.hpp"

namespace smalldev {

enum class Variant {
  kThmA1F3,       // explicit closed form F3 against F1
  kThm42Mp124,    // MP(1,2,4) against F1
  kThm43Mp1234,   // MP(1,2,3,4) against F1
  kThm44Refined,  // MP(1,2,3,4) with T_B = sD against F1-hat, worst s
};

std::string to_string(Variant v);
std::string describe(Variant v);
/// Accepts the to_string names ("thmA1_f3", "thm42_mp124", ...). Throws kArgument.
Variant variant_from_string(const std::string& name);
const std::vector<Variant>& all_variants();

struct Crossing {
  double d_star = 0.0;
  double common_value = 0.0;  // min(moment_side, be_side) at d_star
  double moment_value = 0.0;
  double be_value = 0.0;
  bool crossed = false;       // false: no sign change, best endpoint used
};

/// Locates D* where a nonincreasing moment-side bound meets a nondecreasing
/// Berry-Esseen-side bound. The bracket is sampled on a geometric grid and
/// the first sign change of be - moment is bisected to width tol.
Crossing crossing(const std::function<double(double)>& moment_fn,
                  const std::function<double(double)>& be_fn, double lo, double hi,
                  double tol = 1e-5);

struct CombineOptions {
  double d_lo = 0.2;
  double d_hi = 50.0;
  double d_tol = 1e-5;
  int curve_points = 50;
  std::vector<double> s_grid;  // empty: default_s_grid()
};

/// {0.05, 0.10, ..., 1.00}
std::vector<double> default_s_grid();

struct CurveSample {
  double D;
  double moment_side;
  double be_side;
};

struct GPoint {
  double s;
  double g;       // e^{-xi} * min over D of the larger bound
  double d_star;
  bool crossed;
};

struct CertifiedPoint {
  MomentProblem problem;
  DualCertificate certificate;
};

struct BoundReport {
  std::string name;
  Variant variant = Variant::kThm42Mp124;
  double xi = 0.2;
  double d_star = 0.0;
  double s_star = 1.0;
  double moment_side = 0.0;  // at d_star, before the e^{-xi} factor
  double be_side = 0.0;
  double raw_value = 0.0;    // e^{-xi} * min(moment_side, be_side)
  double bound_value = 0.0;  // raw_value floored to 4 decimals
  bool crossed = true;
  std::vector<CertifiedPoint> moment_certificates;
  std::vector<CurveSample> curve_samples;
  std::vector<GPoint> g_curve;
  double seconds = 0.0;  // wall time; not serialized
};

/// Moment-side and Berry-Esseen-side curves of a variant as functions of
/// D. For kThm44Refined they use T_B = s D.
std::function<double(double)> moment_side_fn(Variant v, double xi, double s = 1.0);
std::function<double(double)> be_side_fn(Variant v, double xi, double s = 1.0);

BoundReport feige_bound(Variant variant, double xi = 0.2, const CombineOptions& options = {});

std::vector<GPoint> g_sweep(double xi, const std::vector<double>& s_grid,
                            const CombineOptions& options = {});

enum class Figure { kFig1, kFig2, kFig3, kFigA1, kFigInterplay };
std::string to_string(Figure f);
Figure figure_from_string(const std::string& name);

struct FigureGrid {
  double d_lo = 0.5;
  double d_hi = 10.0;
  double d_step = 0.05;
  std::vector<double> s_grid;  // fig3 only; empty: default_s_grid()
};

/// CSV with header "D,moment_bound,berry_esseen_bound" (fig1, fig2,
/// fig_interplay), "D,f2,f3" (figA1) or "s,g" (fig3); 10 significant digits.
std::string figure_csv(Figure which, double xi = 0.2, const FigureGrid& grid = {});

std::string report_to_json(const BoundReport& report);

/// Renders with 10 significant digits.
std::string format_number(double v);

}  // namespace smalldev
