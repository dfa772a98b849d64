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

#include "smalldev/combine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include <json.hpp>

#include "smalldev/berry.hpp"
#include "smalldev/closed_form.hpp"
#include "smalldev/error.hpp"
#include "smalldev/numerics.hpp"

namespace smalldev {

namespace {

constexpr int kCrossingSamples = 24;

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double r = std::log(hi / lo);
  for (int i = 0; i < n; ++i) out[i] = lo * std::exp(r * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double floor_to(double v, double unit) { return std::floor(v / unit) * unit; }

std::vector<CurveSample> sample_curves(const std::function<double(double)>& moment,
                                       const std::function<double(double)>& be,
                                       const CombineOptions& opt) {
  std::vector<CurveSample> out;
  for (double D : geometric_grid(opt.d_lo, opt.d_hi, opt.curve_points)) out.push_back({D, moment(D), be(D)});
  return out;
}

GPoint g_point(double xi, double s, const CombineOptions& opt) {
  const auto c = crossing(moment_side_fn(Variant::kThm44Refined, xi, s),
                          be_side_fn(Variant::kThm44Refined, xi, s), opt.d_lo, opt.d_hi, opt.d_tol);
  return {s, std::exp(-xi) * c.common_value, c.d_star, c.crossed};
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kThmA1F3: return "thmA1_f3";
    case Variant::kThm42Mp124: return "thm42_mp124";
    case Variant::kThm43Mp1234: return "thm43_mp1234";
    case Variant::kThm44Refined: return "thm44_refined";
  }
  return "?";
}

std::string describe(Variant v) {
  switch (v) {
    case Variant::kThmA1F3: return "approximate MP(1,2,4) and B-E";
    case Variant::kThm42Mp124: return "MP(1,2,4) and B-E";
    case Variant::kThm43Mp1234: return "MP(1,2,3,4) and B-E";
    case Variant::kThm44Refined: return "MP(1,2,3,4) and B-E with refinement";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  for (Variant v : all_variants())
    if (to_string(v) == name) return v;
  fail(ErrorCode::kArgument, "unknown variant '" + name + "' (expected thmA1_f3, thm42_mp124, thm43_mp1234 or thm44_refined)");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = {Variant::kThmA1F3, Variant::kThm42Mp124,
                                         Variant::kThm43Mp1234, Variant::kThm44Refined};
  return v;
}

std::vector<double> default_s_grid() {
  std::vector<double> s;
  for (int i = 1; i <= 20; ++i) s.push_back(0.05 * i);
  return s;
}

Crossing crossing(const std::function<double(double)>& moment_fn,
                  const std::function<double(double)>& be_fn, double lo, double hi, double tol) {
  require(lo > 0 && lo < hi, "crossing: invalid bracket");
  const auto grid = geometric_grid(lo, hi, kCrossingSamples);
  std::vector<double> mom(grid.size()), be(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mom[i] = moment_fn(grid[i]);
    be[i] = be_fn(grid[i]);
  }

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (be[i] - mom[i] < 0 && be[i + 1] - mom[i + 1] >= 0) {
      auto diff = [&](double D) { return be_fn(D) - moment_fn(D); };
      const double d = numerics::bisect_crossing(diff, grid[i], grid[i + 1], tol);
      Crossing c;
      c.d_star = d;
      c.moment_value = moment_fn(d);
      c.be_value = be_fn(d);
      c.common_value = std::min(c.moment_value, c.be_value);
      c.crossed = true;
      return c;
    }
  }

  // No crossing: each endpoint still yields a valid bound when both curves
  // are monotone; keep the better one.
  Crossing c;
  c.crossed = false;
  const double at_lo = std::min(mom.front(), be.front());
  const double at_hi = std::min(mom.back(), be.back());
  const bool use_lo = at_lo >= at_hi;
  c.d_star = use_lo ? lo : hi;
  c.moment_value = use_lo ? mom.front() : mom.back();
  c.be_value = use_lo ? be.front() : be.back();
  c.common_value = std::max(at_lo, at_hi);
  return c;
}

std::function<double(double)> moment_side_fn(Variant v, double xi, double s) {
  switch (v) {
    case Variant::kThmA1F3:
      return [xi](double D) { return f3(xi, D); };
    case Variant::kThm42Mp124:
      return [xi](double D) { return moment_bound(xi, D, MomentSet::k124).probability_lower; };
    case Variant::kThm43Mp1234:
      return [xi](double D) { return moment_bound(xi, D, MomentSet::k1234).probability_lower; };
    case Variant::kThm44Refined:
      return [xi, s](double D) {
        return moment_bound(xi, D, MomentSet::k1234, M3Mode::refined(s)).probability_lower;
      };
  }
  fail(ErrorCode::kArgument, "moment_side_fn: unknown variant");
}

std::function<double(double)> be_side_fn(Variant v, double xi, double s) {
  if (v == Variant::kThm44Refined) return [xi, s](double D) { return f1_hat(xi, D, s * D); };
  return [xi](double D) { return f1(xi, D); };
}

std::vector<GPoint> g_sweep(double xi, const std::vector<double>& s_grid, const CombineOptions& options) {
  for (double s : s_grid) require(s > 0 && s <= 1, "g_sweep: s must lie in (0, 1]");
  // Grid points are independent; results are collected in grid order.
  std::vector<std::future<GPoint>> jobs;
  for (double s : s_grid)
    jobs.push_back(std::async(std::launch::async, [=, &options] { return g_point(xi, s, options); }));
  std::vector<GPoint> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

BoundReport feige_bound(Variant variant, double xi, const CombineOptions& options) {
  require(xi > 0 && xi <= 1, "feige_bound: xi must lie in (0, 1]");
  const auto start = std::chrono::steady_clock::now();
  BoundReport r;
  r.name = to_string(variant);
  r.variant = variant;
  r.xi = xi;

  if (variant == Variant::kThm44Refined) {
    r.g_curve = g_sweep(xi, options.s_grid.empty() ? default_s_grid() : options.s_grid, options);
    const auto worst = std::min_element(r.g_curve.begin(), r.g_curve.end(),
                                        [](const GPoint& a, const GPoint& b) { return a.g < b.g; });
    r.s_star = worst->s;
  }
  const auto moment = moment_side_fn(variant, xi, r.s_star);
  const auto be = be_side_fn(variant, xi, r.s_star);
  const Crossing c = crossing(moment, be, options.d_lo, options.d_hi, options.d_tol);
  r.d_star = c.d_star;
  r.crossed = c.crossed;
  r.moment_side = c.moment_value;
  r.be_side = c.be_value;
  r.raw_value = std::exp(-xi) * c.common_value;
  r.bound_value = floor_to(r.raw_value, 1e-4);

  if (variant != Variant::kThmA1F3) {
    const MomentSet set = variant == Variant::kThm42Mp124 ? MomentSet::k124 : MomentSet::k1234;
    const M3Mode mode = variant == Variant::kThm44Refined ? M3Mode::refined(r.s_star) : M3Mode::basic();
    const MomentProblem problem{shifted_moments(xi, r.d_star, mode), set};
    r.moment_certificates.push_back({problem, moment_bound(problem).certificate});
  }
  r.curve_samples = sample_curves(moment, be, options);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string to_string(Figure f) {
  switch (f) {
    case Figure::kFig1: return "fig1";
    case Figure::kFig2: return "fig2";
    case Figure::kFig3: return "fig3";
    case Figure::kFigA1: return "figA1";
    case Figure::kFigInterplay: return "fig_interplay";
  }
  return "?";
}

Figure figure_from_string(const std::string& name) {
  for (Figure f : {Figure::kFig1, Figure::kFig2, Figure::kFig3, Figure::kFigA1, Figure::kFigInterplay})
    if (to_string(f) == name) return f;
  fail(ErrorCode::kArgument,
       "unknown figure '" + name + "' (expected fig1, fig2, fig3, figA1 or fig_interplay)");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string figure_csv(Figure which, double xi, const FigureGrid& grid) {
  std::ostringstream os;
  if (which == Figure::kFig3) {
    os << "s,g\n";
    for (const auto& p : g_sweep(xi, grid.s_grid.empty() ? default_s_grid() : grid.s_grid))
      os << format_number(p.s) << ',' << format_number(p.g) << '\n';
    return os.str();
  }

  require(grid.d_lo > 0 && grid.d_hi >= grid.d_lo && grid.d_step > 0, "figure_csv: invalid D grid");
  const int n = static_cast<int>(std::floor((grid.d_hi - grid.d_lo) / grid.d_step + 1e-9)) + 1;
  std::function<double(double)> first, second;
  switch (which) {
    case Figure::kFig1:
      first = moment_side_fn(Variant::kThm42Mp124, xi);
      second = be_side_fn(Variant::kThm42Mp124, xi);
      break;
    case Figure::kFig2:
      first = moment_side_fn(Variant::kThm43Mp1234, xi);
      second = be_side_fn(Variant::kThm43Mp1234, xi);
      break;
    case Figure::kFigInterplay:
      first = moment_side_fn(Variant::kThm44Refined, xi, 1.0);
      second = be_side_fn(Variant::kThm44Refined, xi, 1.0);
      break;
    case Figure::kFigA1:
      first = [xi](double D) { return closed_form_f2(xi, D).value; };
      second = [xi](double D) { return f3(xi, D); };
      break;
    case Figure::kFig3:
      break;
  }
  os << (which == Figure::kFigA1 ? "D,f2,f3\n" : "D,moment_bound,berry_esseen_bound\n");
  for (int i = 0; i < n; ++i) {
    const double D = grid.d_lo + i * grid.d_step;
    os << format_number(D) << ',' << format_number(first(D)) << ',' << format_number(second(D)) << '\n';
  }
  return os.str();
}

std::string report_to_json(const BoundReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["method"] = describe(r.variant);
  j["xi"] = r.xi;
  j["d_star"] = r.d_star;
  j["s_star"] = r.s_star;
  j["moment_side"] = r.moment_side;
  j["be_side"] = r.be_side;
  j["raw_value"] = r.raw_value;
  j["bound_value"] = r.bound_value;
  j["crossed"] = r.crossed;
  j["provenance"] = r.variant == Variant::kThmA1F3 ? "closed-form" : "sdp-certificate";
  auto certs = nlohmann::json::array();
  for (const auto& c : r.moment_certificates)
    certs.push_back(nlohmann::json::parse(certificate_to_json(c.certificate, c.problem)));
  j["moment_certificates"] = certs;
  auto curve = nlohmann::json::array();
  for (const auto& s : r.curve_samples) curve.push_back({s.D, s.moment_side, s.be_side});
  j["curve_samples"] = curve;
  auto g = nlohmann::json::array();
  for (const auto& p : r.g_curve)
    g.push_back({{"s", p.s}, {"g", p.g}, {"d_star", p.d_star}, {"crossed", p.crossed}});
  j["g_curve"] = g;
  return j.dump(2);
}

}  // namespace smalldev
