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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "smalldev/berry.hpp"
#include "smalldev/closed_form.hpp"
#include "smalldev/combine.hpp"
#include "smalldev/error.hpp"
#include "smalldev/moment_sdp.hpp"
#include "smalldev/numerics.hpp"

using namespace smalldev;

namespace {

const BoundReport& cached(Variant v) {
  static std::map<Variant, BoundReport> cache;
  auto it = cache.find(v);
  if (it == cache.end()) it = cache.emplace(v, feige_bound(v, 0.2)).first;
  return it->second;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_SUITE("combine") {

TEST_CASE("variant names") {
  CHECK(to_string(Variant::kThm42Mp124) == "thm42_mp124");
  CHECK(variant_from_string("thm44_refined") == Variant::kThm44Refined);
  CHECK_THROWS_AS(variant_from_string("thm45"), Error);
  CHECK(describe(Variant::kThm42Mp124) == "MP(1,2,4) and B-E");
  CHECK(all_variants().size() == 4);
}

TEST_CASE("crossing of f1 with the closed form") {
  const auto c = crossing([](double D) { return closed_form_f2(0.2, D).value; }, [](double D) { return f1(0.2, D); },
                          0.2, 50.0);
  CHECK(c.crossed);
  CHECK(std::abs(c.d_star - 2.374) <= 0.02);
  CHECK(c.common_value == std::min(c.moment_value, c.be_value));
}

TEST_CASE("crossing of f1 with f3") {
  const auto c = crossing([](double D) { return f3(0.2, D); }, [](double D) { return f1(0.2, D); }, 0.2, 50.0);
  CHECK(c.crossed);
  CHECK(std::abs(c.d_star - 2.367) <= 0.02);
}

TEST_CASE("crossing of f1 with the MP(1,2,3,4) bound") {
  const auto c = crossing(moment_side_fn(Variant::kThm43Mp1234, 0.2), be_side_fn(Variant::kThm43Mp1234, 0.2), 0.2, 50.0);
  CHECK(c.crossed);
  CHECK(std::abs(c.d_star - 2.464) <= 0.02);
}

TEST_CASE("bisection of the refined pair lands near 2.938") {
  const auto m = moment_side_fn(Variant::kThm44Refined, 0.2, 1.0);
  const auto b = be_side_fn(Variant::kThm44Refined, 0.2, 1.0);
  const double d = numerics::bisect_crossing([&](double D) { return b(D) - m(D); }, 0.5, 20.0, 1e-6);
  CHECK(std::abs(d - 2.938) <= 0.02);
}

TEST_CASE("crossing without a sign change takes the better endpoint") {
  const auto c = crossing([](double D) { return 1.0 / D; }, [](double) { return 0.01; }, 1.0, 2.0);
  CHECK_FALSE(c.crossed);
  CHECK(c.d_star == 1.0);
  CHECK(c.common_value == doctest::Approx(0.01));
  const auto d = crossing([](double D) { return 0.9 - 0.01 * D; }, [](double D) { return 0.1 * D; }, 20.0, 30.0);
  CHECK_FALSE(d.crossed);
  CHECK(d.d_star == 20.0);
  CHECK(d.common_value == doctest::Approx(0.7));
}

TEST_CASE("headline bounds") {
  struct Row {
    Variant v;
    double lo, hi, d;
  };
  for (const Row& r : {Row{Variant::kThmA1F3, 0.1536, 0.1545, 2.367}, Row{Variant::kThm42Mp124, 0.1541, 0.1550, 2.374},
                       Row{Variant::kThm43Mp1234, 0.1587, 0.1600, 2.464},
                       Row{Variant::kThm44Refined, 0.1798, 0.1810, 2.938}}) {
    const auto& rep = cached(r.v);
    CAPTURE(rep.name);
    CHECK(rep.bound_value >= r.lo);
    CHECK(rep.bound_value <= r.hi);
    CHECK(std::abs(rep.d_star - r.d) <= 0.02);
    CHECK(rep.crossed);
    CHECK(rep.bound_value <= rep.raw_value);
    CHECK(rep.raw_value - rep.bound_value < 1e-4);
    CHECK(rep.raw_value == doctest::Approx(std::exp(-0.2) * std::min(rep.moment_side, rep.be_side)).epsilon(1e-15));
  }
}

TEST_CASE("variants are ordered by the information they use") {
  CHECK(cached(Variant::kThmA1F3).bound_value <= cached(Variant::kThm42Mp124).bound_value);
  CHECK(cached(Variant::kThm42Mp124).bound_value <= cached(Variant::kThm43Mp1234).bound_value);
  CHECK(cached(Variant::kThm43Mp1234).bound_value <= cached(Variant::kThm44Refined).bound_value);
}

TEST_CASE("SDP variants carry verified certificates at D*") {
  CHECK(cached(Variant::kThmA1F3).moment_certificates.empty());
  for (Variant v : {Variant::kThm42Mp124, Variant::kThm43Mp1234, Variant::kThm44Refined}) {
    const auto& rep = cached(v);
    REQUIRE(rep.moment_certificates.size() == 1);
    const auto& cp = rep.moment_certificates[0];
    CHECK(cp.problem.moments.D == rep.d_star);
    CHECK(verify_certificate(cp.certificate, cp.problem).ok);
    CHECK(1 - cp.certificate.objective >= rep.moment_side);
  }
}

TEST_CASE("validity chain and monotone curves on the sampled grid") {
  for (Variant v : all_variants()) {
    const auto& rep = cached(v);
    CAPTURE(rep.name);
    REQUIRE(rep.curve_samples.size() == 50);
    for (std::size_t i = 0; i < rep.curve_samples.size(); ++i) {
      const auto& s = rep.curve_samples[i];
      if (s.D <= rep.d_star) CHECK(rep.bound_value <= std::exp(-0.2) * s.moment_side);
      if (s.D >= rep.d_star) CHECK(rep.bound_value <= std::exp(-0.2) * s.be_side);
      if (i > 0) {
        CHECK(s.moment_side <= rep.curve_samples[i - 1].moment_side + 1e-12);
        CHECK(s.be_side >= rep.curve_samples[i - 1].be_side - 1e-12);
      }
    }
  }
}

TEST_CASE("bound varies continuously with xi") {
  for (Variant v : {Variant::kThmA1F3, Variant::kThm42Mp124, Variant::kThm43Mp1234}) {
    const double mid = cached(v).bound_value;
    CHECK(std::abs(feige_bound(v, 0.19).bound_value - mid) <= 0.01);
    CHECK(std::abs(feige_bound(v, 0.21).bound_value - mid) <= 0.01);
  }
}

TEST_CASE("g sweep has its minimum at s = 1") {
  const auto& rep = cached(Variant::kThm44Refined);
  REQUIRE(rep.g_curve.size() == 20);
  const auto worst = std::min_element(rep.g_curve.begin(), rep.g_curve.end(),
                                      [](const GPoint& a, const GPoint& b) { return a.g < b.g; });
  CHECK(worst->s == doctest::Approx(1.0));
  CHECK(rep.s_star == doctest::Approx(1.0));
  CHECK(rep.g_curve.back().g == doctest::Approx(0.1798).epsilon(1e-3));
  for (std::size_t i = 0; i < rep.g_curve.size(); ++i) CHECK(rep.g_curve[i].s == doctest::Approx(0.05 * (i + 1)));
}

TEST_CASE("g sweep below xi uses the basic third-moment bound") {
  const auto refined = moment_side_fn(Variant::kThm44Refined, 0.2, 0.1);
  for (double D : {1.0, 2.5, 4.0}) {
    const double basic = moment_bound(0.2, D, MomentSet::k1234).probability_lower;
    CHECK(refined(D) == basic);
  }
}

TEST_CASE("g sweep is independent of evaluation order") {
  const auto a = g_sweep(0.2, {0.3, 0.6, 1.0});
  const auto b = g_sweep(0.2, {1.0, 0.6, 0.3});
  REQUIRE(a.size() == 3);
  CHECK(a[0].s == 0.3);
  CHECK(b[0].s == 1.0);
  CHECK(a[0].g == b[2].g);
  CHECK(a[2].g == b[0].g);
}

TEST_CASE("feige_bound rejects xi outside (0, 1]") {
  CHECK_THROWS_AS(feige_bound(Variant::kThm42Mp124, 0.0), Error);
  CHECK_THROWS_AS(feige_bound(Variant::kThm42Mp124, 1.5), Error);
}

TEST_CASE("figure headers") {
  FigureGrid g;
  g.d_step = 0.5;
  g.s_grid = {0.5, 1.0};
  std::string h;
  parse_csv(figure_csv(Figure::kFig1, 0.2, g), &h);
  CHECK(h == "D,moment_bound,berry_esseen_bound");
  parse_csv(figure_csv(Figure::kFig2, 0.2, g), &h);
  CHECK(h == "D,moment_bound,berry_esseen_bound");
  parse_csv(figure_csv(Figure::kFigInterplay, 0.2, g), &h);
  CHECK(h == "D,moment_bound,berry_esseen_bound");
  parse_csv(figure_csv(Figure::kFigA1, 0.2, g), &h);
  CHECK(h == "D,f2,f3");
  parse_csv(figure_csv(Figure::kFig3, 0.2, g), &h);
  CHECK(h == "s,g");
  CHECK_THROWS_AS(figure_from_string("fig9"), Error);
}

TEST_CASE("fig1 curves cross near 2.374") {
  FigureGrid g;
  g.d_lo = 1.0;
  g.d_hi = 5.0;
  g.d_step = 0.002;
  const auto rows = parse_csv(figure_csv(Figure::kFig1, 0.2, g), nullptr);
  REQUIRE(rows.size() > 100);
  CHECK(rows.front()[1] > rows.front()[2]);
  CHECK(rows.back()[1] < rows.back()[2]);
  int changes = 0;
  double where = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if ((rows[i][1] - rows[i][2]) * (rows[i - 1][1] - rows[i - 1][2]) < 0) {
      ++changes;
      where = rows[i][0];
    }
  CHECK(changes == 1);
  CHECK(std::abs(where - 2.374) <= 0.02);
}

TEST_CASE("figA1 closed form dominates row-wise") {
  const auto rows = parse_csv(figure_csv(Figure::kFigA1), nullptr);
  REQUIRE(rows.size() == 191);
  for (const auto& r : rows) CHECK(r[1] >= r[2]);
}

TEST_CASE("fig3 minimum at s = 1") {
  const auto rows = parse_csv(figure_csv(Figure::kFig3), nullptr);
  REQUIRE(rows.size() == 20);
  const auto worst = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[1] < b[1]; });
  CHECK((*worst)[0] == doctest::Approx(1.0));
}

TEST_CASE("figure output is byte-identical across runs") {
  FigureGrid g;
  g.d_step = 0.25;
  CHECK(figure_csv(Figure::kFig2, 0.2, g) == figure_csv(Figure::kFig2, 0.2, g));
  CHECK(figure_csv(Figure::kFig3) == figure_csv(Figure::kFig3));
}

TEST_CASE("figure grid validation") {
  FigureGrid g;
  g.d_step = 0.0;
  CHECK_THROWS_AS(figure_csv(Figure::kFig1, 0.2, g), Error);
  g.d_step = 0.1;
  g.d_lo = 5.0;
  g.d_hi = 1.0;
  CHECK_THROWS_AS(figure_csv(Figure::kFig1, 0.2, g), Error);
}

TEST_CASE("report json") {
  const auto j = nlohmann::json::parse(report_to_json(cached(Variant::kThm42Mp124)));
  CHECK(j["name"] == "thm42_mp124");
  CHECK(j["provenance"] == "sdp-certificate");
  CHECK(j["bound_value"].get<double>() == cached(Variant::kThm42Mp124).bound_value);
  CHECK(j["moment_certificates"].size() == 1);
  CHECK_FALSE(j.contains("seconds"));
  const auto a1 = nlohmann::json::parse(report_to_json(cached(Variant::kThmA1F3)));
  CHECK(a1["provenance"] == "closed-form");
  CHECK(report_to_json(cached(Variant::kThm43Mp1234)) == report_to_json(cached(Variant::kThm43Mp1234)));
}

TEST_CASE("number formatting uses ten significant digits") {
  CHECK(format_number(0.15411623951234) == "0.1541162395");
  CHECK(format_number(2.0) == "2");
}

}  // TEST_SUITE
