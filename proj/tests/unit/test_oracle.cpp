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
#include <random>

#include <json.hpp>

#include "smalldev/error.hpp"
#include "smalldev/moment_sdp.hpp"
#include "smalldev/oracle.hpp"

using namespace smalldev;
using namespace smalldev::oracle;

namespace {

bool same_distribution(const SumDistribution& a, const SumDistribution& b) {
  if (a.atoms.size() != b.atoms.size()) return false;
  for (std::size_t i = 0; i < a.atoms.size(); ++i)
    if (std::abs(a.atoms[i].value - b.atoms[i].value) > 1e-12 || std::abs(a.atoms[i].prob - b.atoms[i].prob) > 1e-12)
      return false;
  return true;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("single variable") {
  const auto d = exact_sum(Instance{0.2, {{0.2, 1.0}}});
  REQUIRE(d.atoms.size() == 2);
  CHECK(d.prob_le(0.2) == doctest::Approx(1.0 / 1.2).epsilon(1e-15));
  CHECK(d.prob_lt(-0.2) == 0.0);
  CHECK(d.prob_le(-0.2) == doctest::Approx(1.0 / 1.2).epsilon(1e-15));
  CHECK(d.prob_le(1.0) == doctest::Approx(1.0));
}

TEST_CASE("empty instance is a point mass at zero") {
  const auto d = exact_sum(Instance{0.2, {}});
  REQUIRE(d.atoms.size() == 1);
  CHECK(d.atoms[0].value == 0.0);
  CHECK(d.prob_le(0.2) == 1.0);
}

TEST_CASE("identical variables merge into a binomial") {
  Instance inst{0.2, std::vector<TwoPointVar>(10, TwoPointVar{0.2, 0.2})};
  const auto d = exact_sum(inst);
  CHECK(d.atoms.size() == 11);
  CHECK(d.atoms[5].prob == doctest::Approx(252.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("mass conservation and shuffle invariance") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    auto r = trial_rng(8, t);
    auto inst = random_instance(r, 14, 0.2);
    const auto d = exact_sum(inst);
    CHECK(std::abs(d.total_mass() - 1.0) <= 1e-12);
    CHECK(std::is_sorted(d.atoms.begin(), d.atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; }));
    std::shuffle(inst.vars.begin(), inst.vars.end(), rng);
    CHECK(same_distribution(d, exact_sum(inst)));
  }
}

TEST_CASE("enumeration size limit") {
  std::vector<RawTwoPoint> raw(25, RawTwoPoint{0.1, 0.7});
  try {
    convolve_two_point(raw);
    FAIL("expected a size error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSize);
  }
  std::vector<RawTwoPoint> live(24, RawTwoPoint{0.1, 0.7});
  live.push_back({0.0, 0.5});  // constant zero, does not count
  CHECK_NOTHROW(convolve_two_point(live));
}

TEST_CASE("monte carlo band contains the exact value") {
  Instance inst{0.2, {{0.1, 0.3}, {0.2, 1.0}, {0.15, 0.6}, {0.05, 0.2}}};
  const double exact = exact_sum(inst).prob_le(0.2);
  const auto mc = monte_carlo_prob_le(inst, 0.2, 200000, 3);
  CHECK(mc.lo <= exact);
  CHECK(mc.hi >= exact);
  CHECK(mc.samples == 200000);
  const auto again = monte_carlo_prob_le(inst, 0.2, 200000, 3);
  CHECK(again.estimate == mc.estimate);
}

TEST_CASE("trial streams are reproducible and distinct") {
  auto a = trial_rng(42, 7);
  auto b = trial_rng(42, 7);
  auto c = trial_rng(42, 8);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(a);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("random instances respect their bounds") {
  for (int t = 0; t < 500; ++t) {
    auto r = trial_rng(1, t);
    const auto inst = random_instance(r, 14, 0.2);
    REQUIRE(inst.vars.size() >= 1);
    REQUIRE(inst.vars.size() <= 14);
    CHECK_NOTHROW(inst.validate());
  }
}

TEST_CASE("verify_bounds finds no violation of the pipeline claims") {
  const auto rep = verify_bounds(42, 200, 12, 0.2);
  CHECK(rep.ok());
  CHECK(rep.claims.size() == 4);
  CHECK(rep.instances_checked == 200 + 12 + 1);
  CHECK(rep.min_probability >= std::exp(0.2) * 0.1798);
  const auto j = nlohmann::json::parse(verification_to_json(rep));
  CHECK(j["seed"] == 42);
  CHECK(j["violations"].empty());
}

TEST_CASE("verify_bounds reports a violation of an inflated claim") {
  const auto rep = verify_bounds(1, 20, 8, 0.2, {{"too strong", 0.99}});
  CHECK_FALSE(rep.ok());
  REQUIRE(!rep.violations.empty());
  const auto& v = rep.violations.front();
  CHECK(v.claim == "too strong");
  CHECK(v.probability < 0.99);
  const auto j = nlohmann::json::parse(verification_to_json(rep));
  CHECK(j["violations"][0]["instance"]["vars"].is_array());
}

TEST_CASE("adversarial and degenerate instances") {
  for (int n = 1; n <= 14; ++n) {
    Instance inst{0.2, std::vector<TwoPointVar>(n, TwoPointVar{0.2, 1.0})};
    CHECK(exact_sum(inst).prob_le(0.2) >= std::exp(0.2) * 0.1798);
  }
  Instance zero{0.2, std::vector<TwoPointVar>(5, TwoPointVar{0.0, 0.7})};
  CHECK(exact_sum(zero).prob_le(0.2) == 1.0);
}

TEST_CASE("verify_bounds argument checks") {
  CHECK_THROWS_AS(verify_bounds(1, 0, 8, 0.2, {}), Error);
  CHECK_THROWS_AS(verify_bounds(1, 5, 0, 0.2, {}), Error);
}

TEST_CASE("moment formulas") {
  const auto rep = verify_moment_formulas(42, 300);
  CHECK(rep.ok());
  CHECK(rep.bounds_hold);
  CHECK(rep.max_relative_error <= 1e-10);
}

TEST_CASE("moment formulas by hand") {
  const Instance one{0.2, {{0.2, 1.0}}};
  const auto d = exact_sum(one);
  CHECK(d.moment(2, 0.2) == doctest::Approx(0.24).epsilon(1e-14));
  const auto s = stats(one);
  CHECK(d.moment(3, 0.2) == doctest::Approx(-0.008 - 0.6 * s.D - s.T_M).epsilon(1e-13));
  const auto z = exact_sum(Instance{0.2, {}});
  CHECK(z.moment(1, 0.2) == doctest::Approx(-0.2));
  CHECK(z.moment(2, 0.2) == doctest::Approx(0.04));
  CHECK(z.moment(3, 0.2) == doctest::Approx(-0.008));
  CHECK(z.moment(4, 0.2) == doctest::Approx(0.0016));
}

TEST_CASE("two-atom Chebyshev family") {
  // Mean 0, variance 1: atoms -1/t and t carry Prob[Z >= 0] = 1 / (1 + t^2).
  MomentProblem p;
  p.moments.M1 = 0.0;
  p.moments.M2 = 1.0;
  p.moments.B4 = INFINITY;
  double best = 0.0;
  for (double t = 0.05; t <= 5.0; t += 0.05) {
    const auto r = evaluate_locations({-1.0 / t, t}, p);
    REQUIRE(r.status == PrimalStatus::kFeasible);
    CHECK(r.value == doctest::Approx(1.0 / (1.0 + t * t)).epsilon(1e-9));
    best = std::max(best, r.value);
  }
  CHECK(best >= 0.5);
  CHECK(evaluate_locations({-2.0, 3.0}, p).status == PrimalStatus::kInfeasibleNotProven);
  const auto search = atomic_primal_search(p);
  CHECK(search.status == PrimalStatus::kFeasible);
  CHECK(search.value >= 0.5);
  CHECK(search.value <= 1.0 + 1e-12);
}

TEST_CASE("moment-infeasible data is never claimed feasible") {
  MomentProblem p;
  p.moments.M1 = -0.2;
  p.moments.M2 = 0.01;
  p.moments.B4 = INFINITY;
  const auto r = atomic_primal_search(p, {10, 1, 0});
  CHECK(r.status == PrimalStatus::kInfeasibleNotProven);
  CHECK(r.value == -1.0);
}

TEST_CASE("primal distributions satisfy the moment constraints") {
  const MomentProblem p{shifted_moments(0.2, 2.374), MomentSet::k124};
  const auto r = atomic_primal_search(p, {8, 3, 0});
  REQUIRE(r.status == PrimalStatus::kFeasible);
  const auto& d = r.distribution;
  REQUIRE(d.locations.size() == 4);
  double m[5] = {0, 0, 0, 0, 0}, up = 0;
  for (std::size_t i = 0; i < d.locations.size(); ++i) {
    CHECK(d.weights[i] >= 0.0);
    for (int k = 0; k < 5; ++k) m[k] += d.weights[i] * std::pow(d.locations[i], k);
    if (d.locations[i] >= 0) up += d.weights[i];
  }
  CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m[1] == doctest::Approx(p.moments.M1).epsilon(1e-9));
  CHECK(m[2] == doctest::Approx(p.moments.M2).epsilon(1e-9));
  CHECK(m[4] <= p.moments.B4 * (1 + 1e-9));
  CHECK(up == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("duality bracket at the MP(1,2,4) operating point") {
  const MomentProblem p{shifted_moments(0.2, 2.374), MomentSet::k124};
  const auto b = duality_bracket(p);
  CHECK(b.primal >= 0.8116);
  CHECK(b.primal <= b.upper);
  CHECK(b.gap <= 1e-4);
}

TEST_CASE("weak duality across a grid") {
  for (double D : {0.5, 1.5, 4.0})
    for (MomentSet set : {MomentSet::k124, MomentSet::k1234}) {
      const MomentProblem p{shifted_moments(0.2, D), set};
      const auto r = atomic_primal_search(p, {6, 5, 0});
      CHECK(r.value <= moment_bound(p).opt_upper + 1e-9);
    }
}

TEST_CASE("truncation reduction end to end") {
  const auto c = verify_truncation(5, 300, 5.0);
  CHECK(c.violations == 0);
  CHECK(c.min_margin >= -1e-12);
  CHECK(c.min_group_a_mass_ratio >= 1.0 - 1e-12);
}

}  // TEST_SUITE
