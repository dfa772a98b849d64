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

#include <cmath>
#include <random>

#include "smalldev/error.hpp"
#include "smalldev/model.hpp"
#include "smalldev/oracle.hpp"

using namespace smalldev;

namespace {

Instance random_inst(std::mt19937_64& rng, double xi, int n) {
  std::uniform_real_distribution<double> ua(0.0, xi), ub(0.0, 1.0);
  Instance inst;
  inst.xi = xi;
  for (int i = 0; i < n; ++i) inst.vars.push_back({ua(rng), ub(rng)});
  return inst;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("two-point probabilities") {
  const TwoPointVar v{0.2, 1.0};
  CHECK(v.prob_neg() == doctest::Approx(1.0 / 1.2));
  CHECK(v.prob_pos() == doctest::Approx(0.2 / 1.2));
  CHECK(v.prob_neg() * -v.a + v.prob_pos() * v.b == doctest::Approx(0.0).epsilon(1e-15));
  const TwoPointVar z{0.0, 0.0};
  CHECK(z.degenerate());
  CHECK(z.prob_neg() == 1.0);
}

TEST_CASE("instance validation") {
  Instance ok{0.2, {{0.2, 1.0}, {0.0, 0.5}}};
  CHECK_NOTHROW(ok.validate());
  Instance big_a{0.2, {{0.3, 1.0}}};
  CHECK_THROWS_AS(big_a.validate(), Error);
  Instance big_b{0.2, {{0.1, 1.5}}};
  CHECK_THROWS_AS(big_b.validate(), Error);
  Instance bad_xi{1.5, {}};
  CHECK_THROWS_AS(bad_xi.validate(), Error);
}

TEST_CASE("stats of a single variable") {
  const auto s = stats(Instance{0.2, {{0.2, 1.0}}});
  CHECK(s.D == doctest::Approx(0.2));
  CHECK(s.T_B == doctest::Approx(0.2 * 1.04 / 1.2));
  CHECK(s.T_M == doctest::Approx(-0.16));
}

TEST_CASE("stats of the empty instance and of degenerate variables") {
  const auto e = stats(Instance{0.2, {}});
  CHECK(e.D == 0.0);
  CHECK(e.T_B == 0.0);
  CHECK(e.T_M == 0.0);
  const auto d = stats(Instance{0.2, {{0.0, 0.0}, {0.0, 0.0}}});
  CHECK(d.D == 0.0);
  CHECK(d.T_B == 0.0);
}

TEST_CASE("stats invariants on random instances") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const double xi = 0.05 + 0.95 * std::uniform_real_distribution<double>()(rng);
    const auto inst = random_inst(rng, xi, 1 + t % 15);
    const auto s = stats(inst);
    REQUIRE(s.T_B + s.T_M <= 2 * xi * s.D + 1e-12);
    REQUIRE(s.T_M <= xi * s.D + 1e-12);
    REQUIRE(s.T_B <= s.D + 1e-12);
    REQUIRE(s.T_B >= 0.0);
  }
}

TEST_CASE("s_of_xi corner values") {
  CHECK(s_of_xi(0.2) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(s_of_xi(1.0) == doctest::Approx(5.0));
  CHECK(s_of_xi(1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(s_of_xi(0.0), Error);
  CHECK_THROWS_AS(s_of_xi(1.5), Error);
}

TEST_CASE("s_of_xi dominates the interior") {
  std::mt19937_64 rng(9);
  for (double xi : {0.05, 0.2, 0.5, 1.0}) {
    const double S = s_of_xi(xi);
    std::uniform_real_distribution<double> ua(0.0, xi), ub(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
      const double a = ua(rng), b = ub(rng);
      REQUIRE(a * a + b * b - 4 * a * b - 4 * xi * (b - a) <= S + 1e-12);
    }
  }
}

TEST_CASE("shifted moments at the basic operating point") {
  const auto m = shifted_moments(0.2, 2.374);
  CHECK(m.M1 == doctest::Approx(-0.2));
  CHECK(m.M2 == doctest::Approx(2.414));
  CHECK(m.B4 == doctest::Approx(3 * 2.374 * 2.374 + 0.24 * 2.374 + 0.0016 + 0.2 * 2.374).epsilon(1e-14));
  CHECK(m.B4 == doctest::Approx(17.9538).epsilon(1e-5));
  CHECK(m.L3 == doctest::Approx(-0.008 - 0.8 * 2.374));
  CHECK(m.B4 >= m.M2 * m.M2);
}

TEST_CASE("refined third moment bound") {
  const auto r = shifted_moments(0.2, 2.938, M3Mode::refined(1.0));
  CHECK(r.L3 == doctest::Approx(-0.008).epsilon(1e-12));
  const auto basic = shifted_moments(0.2, 3.3);
  CHECK(shifted_moments(0.2, 3.3, M3Mode::refined(0.1)).L3 == basic.L3);
  CHECK(shifted_moments(0.2, 3.3, M3Mode::refined(0.2)).L3 == doctest::Approx(basic.L3).epsilon(1e-14));
}

TEST_CASE("shifted moments reject bad input") {
  CHECK_THROWS_AS(shifted_moments(0.2, 0.0), Error);
  CHECK_THROWS_AS(shifted_moments(0.2, -1.0), Error);
  CHECK_THROWS_AS(shifted_moments(0.2, 1.0, M3Mode::refined(0.0)), Error);
  CHECK_THROWS_AS(shifted_moments(0.2, 1.0, M3Mode::refined(1.5)), Error);
}

TEST_CASE("shifted moment invariants on a grid") {
  for (double xi : {0.1, 0.2, 0.5, 1.0})
    for (double D = 0.05; D < 60; D *= 1.3) {
      const auto m = shifted_moments(xi, D);
      REQUIRE(m.M1 == -xi);
      REQUIRE(m.M2 >= xi * xi);
      REQUIRE(m.B4 >= m.M2 * m.M2);
      REQUIRE(m.L3 <= 0.0);
    }
}

TEST_CASE("moment formulas against enumeration with n up to 12") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const double xi = 0.05 + 0.95 * std::uniform_real_distribution<double>()(rng);
    const auto inst = random_inst(rng, xi, 1 + t % 12);
    const auto s = stats(inst);
    if (s.D <= 0) continue;
    const auto dist = oracle::exact_sum(inst);
    const auto m = shifted_moments(xi, s.D);
    const double e2 = dist.moment(2, xi), e3 = dist.moment(3, xi), e4 = dist.moment(4, xi);
    REQUIRE(std::abs(e2 - m.M2) <= 1e-10 * m.M2);
    REQUIRE(e3 >= m.L3 - 1e-10 * std::abs(m.L3));
    REQUIRE(e4 <= m.B4 * (1 + 1e-10));
  }
}

TEST_CASE("truncation examples") {
  const auto p1 = truncate_partition({{0.1, 10.0}}, 5.0);
  CHECK(p1.A.size() == 1);
  CHECK(p1.B.empty());
  CHECK(p1.a_sum == doctest::Approx(0.1));
  CHECK(p1.transformed.vars.empty());

  const auto p2 = truncate_partition({{0.5, 0.5}}, 5.0);
  CHECK(p2.A.empty());
  REQUIRE(p2.B.size() == 1);
  CHECK(p2.transformed.xi == doctest::Approx(0.2));
  CHECK(p2.transformed.vars[0].b == doctest::Approx(0.1));
  CHECK(p2.transformed.vars[0].a == doctest::Approx(0.1));
}

TEST_CASE("truncation rejects tau <= 1 and invalid pairs") {
  CHECK_THROWS_AS(truncate_partition({{0.5, 0.5}}, 1.0), Error);
  CHECK_THROWS_AS(truncate_partition({{1.5, 0.5}}, 5.0), Error);
  CHECK_THROWS_AS(truncate_partition({{0.5, 0.0}}, 5.0), Error);
}

TEST_CASE("truncation ties break by original index") {
  const auto p = truncate_partition({{0.3, 2.0}, {0.2, 2.0}, {0.1, 2.0}}, 5.0);
  std::vector<std::size_t> all = p.A;
  all.insert(all.end(), p.B.begin(), p.B.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("truncated variables stay inside [-1/tau, 1]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(1e-3, 1.0), lb(std::log(0.01), std::log(50.0));
  for (int t = 0; t < 3000; ++t) {
    std::vector<RawTwoPoint> raw;
    for (int i = 0; i < 1 + t % 9; ++i) raw.push_back({ua(rng), std::exp(lb(rng))});
    const double tau = 1.5 + 6 * std::uniform_real_distribution<double>()(rng);
    const auto p = truncate_partition(raw, tau);
    REQUIRE(p.A.size() + p.B.size() == raw.size());
    for (const auto& v : p.transformed.vars) {
      REQUIRE(v.a <= 1.0 / tau + 1e-15);
      REQUIRE(v.b <= 1.0 + 1e-12);
    }
    double mass = 1.0;
    for (auto i : p.A) mass *= raw[i].b / (raw[i].a + raw[i].b);
    REQUIRE(mass >= std::exp(-1.0 / tau) * (1 - 1e-12));
  }
}

TEST_CASE("instance json round trip") {
  const Instance inst{0.2, {{0.1, 0.5}, {0.2, 1.0}}};
  const auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.xi == inst.xi);
  REQUIRE(back.vars.size() == 2);
  CHECK(back.vars[1].a == 0.2);
  CHECK(back.vars[1].b == 1.0);
  CHECK_THROWS_AS(instance_from_json("{\"xi\": 0.2}"), Error);
  CHECK_THROWS_AS(instance_from_json("not json"), Error);
  CHECK_THROWS_AS(instance_from_json(R"({"xi": 0.2, "vars": [{"a": 0.5, "b": 1}]})"), Error);
}

}  // TEST_SUITE
