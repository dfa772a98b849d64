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

#include "smalldev/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <gsl/gsl_multimin.h>
#include <json.hpp>

#include "smalldev/combine.hpp"
#include "smalldev/error.hpp"

namespace smalldev::oracle {

namespace {

constexpr double kClaimSlack = 1e-9;
constexpr std::uint64_t kMonteCarloSamples = 10'000'000;

void merge_sorted(std::vector<Atom>& atoms) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < atoms.size();) {
    Atom merged = atoms[i];
    std::size_t j = i + 1;
    while (j < atoms.size() && atoms[j].value - merged.value <= kMergeTolerance) merged.prob += atoms[j++].prob;
    atoms[out++] = merged;
    i = j;
  }
  atoms.resize(out);
}

nlohmann::json instance_json(const Instance& inst) { return nlohmann::json::parse(instance_to_json(inst)); }

// ---- weight LP for fixed atom locations ------------------------------------

struct Row {
  std::vector<double> coef;
  double rhs;
};

struct WeightLp {
  std::vector<Row> eq;
  std::vector<Row> le;
};

WeightLp build_lp(const std::vector<double>& x, const MomentProblem& p) {
  const auto& m = p.moments;
  const std::size_t k = x.size();
  auto powers = [&](int r, double sign) {
    std::vector<double> c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = sign * std::pow(x[j], r);
    return c;
  };
  WeightLp lp;
  lp.eq.push_back({powers(0, 1.0), 1.0});
  lp.eq.push_back({powers(1, 1.0), m.M1});
  lp.eq.push_back({powers(2, 1.0), m.M2});
  if (std::isfinite(m.B4)) lp.le.push_back({powers(4, 1.0), m.B4});
  if (p.set == MomentSet::k1234) lp.le.push_back({powers(3, -1.0), -m.L3});
  return lp;
}

// Best vertex of {w >= 0, eq, le}: every vertex has k active constraints.
double solve_weight_lp(const std::vector<double>& x, const MomentProblem& p, std::vector<double>* best_w) {
  const int k = static_cast<int>(x.size());
  const WeightLp lp = build_lp(x, p);
  // Candidate rows: equalities, inequalities, then w_j = 0.
  std::vector<Row> rows = lp.eq;
  rows.insert(rows.end(), lp.le.begin(), lp.le.end());
  for (int j = 0; j < k; ++j) {
    std::vector<double> e(k, 0.0);
    e[j] = 1.0;
    rows.push_back({e, 0.0});
  }
  const int n_eq = static_cast<int>(lp.eq.size());
  const int n_rows = static_cast<int>(rows.size());
  const int forced = std::min(n_eq, k);

  double best = -1.0;
  auto feasible = [&](const Eigen::VectorXd& w) {
    for (int j = 0; j < k; ++j)
      if (w(j) < -1e-13) return false;
    for (const auto& r : lp.eq) {
      double v = 0;
      for (int j = 0; j < k; ++j) v += r.coef[j] * w(j);
      if (std::abs(v - r.rhs) > 1e-10 * std::max(1.0, std::abs(r.rhs))) return false;
    }
    for (const auto& r : lp.le) {
      double v = 0;
      for (int j = 0; j < k; ++j) v += r.coef[j] * w(j);
      if (v > r.rhs + 1e-12 * std::max(1.0, std::abs(r.rhs))) return false;
    }
    return true;
  };

  // Enumerate subsets of size k that contain the first `forced` equality rows.
  std::vector<int> pool;
  for (int r = forced; r < n_rows; ++r) pool.push_back(r);
  const int pick = k - forced;
  std::vector<bool> mask(pool.size(), false);
  std::fill(mask.begin(), mask.begin() + std::min<std::size_t>(pick, pool.size()), true);
  if (pick > static_cast<int>(pool.size())) return -1.0;
  do {
    std::vector<int> active;
    for (int r = 0; r < forced; ++r) active.push_back(r);
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask[i]) active.push_back(pool[i]);
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) A(i, j) = rows[active[i]].coef[j];
      b(i) = rows[active[i]].rhs;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd w = lu.solve(b);
    if (!feasible(w)) continue;
    double v = 0.0;
    for (int j = 0; j < k; ++j)
      if (x[j] >= 0) v += std::max(0.0, w(j));
    if (v > best) {
      best = v;
      if (best_w) {
        best_w->resize(k);
        for (int j = 0; j < k; ++j) (*best_w)[j] = std::max(0.0, w(j));
      }
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

struct SearchContext {
  const MomentProblem* problem;
};

double nm_objective(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const SearchContext*>(params);
  std::vector<double> x(v->size);
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  return -solve_weight_lp(x, *ctx->problem, nullptr);
}

}  // namespace

// ---- exact distributions ---------------------------------------------------

double SumDistribution::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.prob;
  return s;
}

double SumDistribution::prob_le(double t) const {
  double s = 0.0;
  for (const auto& a : atoms) {
    if (a.value > t + kMergeTolerance) break;
    s += a.prob;
  }
  return s;
}

double SumDistribution::prob_lt(double t) const {
  double s = 0.0;
  for (const auto& a : atoms) {
    if (a.value >= t - kMergeTolerance) break;
    s += a.prob;
  }
  return s;
}

double SumDistribution::moment(int r, double shift) const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.prob * std::pow(a.value - shift, r);
  return s;
}

SumDistribution convolve_two_point(std::span<const RawTwoPoint> vars) {
  std::size_t live = 0;
  for (const auto& v : vars)
    if (v.a > 0 && v.b > 0) ++live;
  if (live > kMaxExactVars)
    fail(ErrorCode::kSize, "exact_sum: " + std::to_string(live) + " variables exceed the enumeration limit");

  std::vector<Atom> cur{{0.0, 1.0}};
  std::vector<Atom> lo, hi, next;
  for (const auto& v : vars) {
    if (v.a + v.b <= 0) continue;
    const double p_neg = v.b / (v.a + v.b);
    const double p_pos = v.a / (v.a + v.b);
    if (p_pos == 0.0) {
      for (auto& a : cur) a.value -= v.a;
      continue;
    }
    if (p_neg == 0.0) {
      for (auto& a : cur) a.value += v.b;
      continue;
    }
    lo.clear();
    hi.clear();
    for (const auto& a : cur) {
      lo.push_back({a.value - v.a, a.prob * p_neg});
      hi.push_back({a.value + v.b, a.prob * p_pos});
    }
    next.resize(lo.size() + hi.size());
    std::merge(lo.begin(), lo.end(), hi.begin(), hi.end(), next.begin(),
               [](const Atom& x, const Atom& y) { return x.value < y.value; });
    merge_sorted(next);
    cur.swap(next);
  }
  return {cur};
}

SumDistribution exact_sum(const Instance& instance) {
  instance.validate();
  std::vector<RawTwoPoint> raw;
  raw.reserve(instance.vars.size());
  for (const auto& v : instance.vars) raw.push_back({v.a, v.b});
  return convolve_two_point(raw);
}

MonteCarloEstimate monte_carlo_prob_le(const Instance& instance, double t, std::uint64_t samples,
                                       std::uint64_t seed) {
  require(samples > 0, "monte_carlo_prob_le: need at least one sample");
  std::mt19937_64 rng = trial_rng(seed, 0);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    double s = 0.0;
    for (const auto& v : instance.vars) s += uniform01(rng) < v.prob_neg() ? -v.a : v.b;
    if (s <= t + kMergeTolerance) ++hits;
  }
  MonteCarloEstimate e;
  e.samples = samples;
  e.estimate = static_cast<double>(hits) / samples;
  const double sd = std::sqrt(e.estimate * (1 - e.estimate) / samples);
  e.lo = std::max(0.0, e.estimate - 3 * sd);
  e.hi = std::min(1.0, e.estimate + 3 * sd);
  return e;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Instance random_instance(std::mt19937_64& rng, int n_max, double xi) {
  require(n_max >= 1, "random_instance: n_max must be positive");
  Instance inst;
  inst.xi = xi;
  const int n = 1 + std::min(n_max - 1, static_cast<int>(uniform01(rng) * n_max));
  for (int i = 0; i < n; ++i) {
    const double a = uniform01(rng) * xi;
    const double b = uniform01(rng);
    inst.vars.push_back({a, b});
  }
  return inst;
}

// ---- bound verification ----------------------------------------------------

std::vector<Claim> pipeline_claims(double xi) {
  std::vector<Claim> claims;
  for (Variant v : all_variants()) {
    const BoundReport r = feige_bound(v, xi);
    claims.push_back({r.name, std::exp(xi) * r.bound_value});
  }
  return claims;
}

VerificationReport verify_bounds(std::uint64_t seed, int trials, int n_max, double xi,
                                 const std::vector<Claim>& claims) {
  require(trials >= 1, "verify_bounds: trials must be at least 1");
  require(n_max >= 1, "verify_bounds: n_max must be at least 1");
  require(xi > 0 && xi <= 1, "verify_bounds: xi must lie in (0, 1]");

  VerificationReport rep;
  rep.seed = seed;
  rep.trials = trials;
  rep.n_max = n_max;
  rep.xi = xi;
  rep.claims = claims;

  auto check = [&](const Instance& inst, const std::string& source) {
    ++rep.instances_checked;
    std::size_t live = 0;
    for (const auto& v : inst.vars)
      if (v.a > 0 && v.b > 0) ++live;
    if (live > kMaxExactVars) {
      ++rep.monte_carlo_instances;
      const auto mc = monte_carlo_prob_le(inst, xi, kMonteCarloSamples, seed ^ rep.instances_checked);
      for (const auto& c : claims)
        if (mc.hi < c.omega) ++rep.monte_carlo_suspects;
      return;
    }
    const double p = exact_sum(inst).prob_le(xi);
    rep.min_probability = std::min(rep.min_probability, p);
    for (const auto& c : claims)
      if (p < c.omega - kClaimSlack) rep.violations.push_back({source, c.name, p, c.omega, inst});
  };

  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    check(random_instance(rng, n_max, xi), "trial " + std::to_string(t));
  }
  for (int n = 1; n <= n_max; ++n) {
    Instance inst;
    inst.xi = xi;
    inst.vars.assign(n, TwoPointVar{xi, 1.0});
    check(inst, "adversarial n=" + std::to_string(n));
  }
  Instance zero;
  zero.xi = xi;
  zero.vars.assign(n_max, TwoPointVar{0.0, 1.0});
  check(zero, "degenerate a=0");
  return rep;
}

VerificationReport verify_bounds(std::uint64_t seed, int trials, int n_max, double xi) {
  return verify_bounds(seed, trials, n_max, xi, pipeline_claims(xi));
}

std::string verification_to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["n_max"] = r.n_max;
  j["xi"] = r.xi;
  auto claims = nlohmann::json::array();
  for (const auto& c : r.claims) claims.push_back({{"name", c.name}, {"omega", c.omega}});
  j["claims"] = claims;
  auto viol = nlohmann::json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"source", v.source},
                    {"claim", v.claim},
                    {"probability", v.probability},
                    {"omega", v.omega},
                    {"instance", instance_json(v.instance)}});
  j["violations"] = viol;
  j["instances_checked"] = r.instances_checked;
  j["monte_carlo_instances"] = r.monte_carlo_instances;
  j["monte_carlo_suspects"] = r.monte_carlo_suspects;
  j["min_probability"] = r.min_probability;
  if (r.max_gap >= 0) j["max_gap"] = r.max_gap;
  else j["max_gap"] = nullptr;
  return j.dump(2);
}

MomentFormulaReport verify_moment_formulas(std::uint64_t seed, int trials, double tolerance) {
  require(trials >= 1, "verify_moment_formulas: trials must be at least 1");
  MomentFormulaReport rep;
  rep.seed = seed;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const double xi = 0.05 + 0.95 * uniform01(rng);
    const Instance inst = random_instance(rng, 10, xi);
    const SumDistribution dist = exact_sum(inst);
    const InstanceStats st = stats(inst);
    const double D = st.D;

    double extra4 = 0.0;
    for (const auto& v : inst.vars)
      extra4 += v.a * v.b * (v.a * v.a + v.b * v.b - 4 * v.a * v.b - 4 * xi * (v.b - v.a));
    const double closed[3] = {D + xi * xi, -std::pow(xi, 3) - 3 * xi * D - st.T_M,
                              3 * D * D + 6 * xi * xi * D + std::pow(xi, 4) + extra4};
    double enumerated[3];
    for (int r = 2; r <= 4; ++r) {
      enumerated[r - 2] = dist.moment(r, xi);
      const double scale = std::max(std::abs(closed[r - 2]), std::pow(xi, r));
      const double err = std::abs(enumerated[r - 2] - closed[r - 2]) / scale;
      rep.max_relative_error = std::max(rep.max_relative_error, err);
      if (err > tolerance)
        rep.failures.push_back("trial " + std::to_string(t) + ": E[Z^" + std::to_string(r) +
                               "] mismatch " + std::to_string(err));
    }
    if (D <= 0) continue;
    const ShiftedMoments basic = shifted_moments(xi, D);
    const double s = std::clamp(st.T_B / D, 1e-12, 1.0);
    const ShiftedMoments refined = shifted_moments(xi, D, M3Mode::refined(s));
    const double slack3 = 1e-12 * std::max(1.0, std::abs(enumerated[1]));
    const bool ok = basic.L3 <= enumerated[1] + slack3 && refined.L3 <= enumerated[1] + slack3 &&
                    enumerated[2] <= basic.B4 * (1 + 1e-12);
    if (!ok) {
      rep.bounds_hold = false;
      rep.failures.push_back("trial " + std::to_string(t) + ": moment bounds violated");
    }
  }
  return rep;
}

// ---- primal search ---------------------------------------------------------

PrimalResult evaluate_locations(const std::vector<double>& locations, const MomentProblem& problem) {
  require(!locations.empty(), "evaluate_locations: need at least one atom");
  PrimalResult r;
  std::vector<double> w;
  const double v = solve_weight_lp(locations, problem, &w);
  if (v >= 0) {
    r.value = v;
    r.distribution = {locations, w};
    r.status = PrimalStatus::kFeasible;
  }
  return r;
}

PrimalResult atomic_primal_search(const MomentProblem& problem, const PrimalSearchOptions& options) {
  require(options.restarts >= 1, "atomic_primal_search: restarts must be positive");
  const auto& m = problem.moments;
  int k = options.atoms;
  if (k <= 0) k = 3 + (std::isfinite(m.B4) ? 1 : 0) + (problem.set == MomentSet::k1234 ? 1 : 0);
  require(k >= 1, "atomic_primal_search: need at least one atom");

  const double spread = m.M2 > 0 ? std::sqrt(m.M2) : 1.0;
  SearchContext ctx{&problem};
  gsl_multimin_function fn{&nm_objective, static_cast<std::size_t>(k), &ctx};
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, k);
  gsl_vector* x = gsl_vector_alloc(k);
  gsl_vector* step = gsl_vector_alloc(k);

  PrimalResult best;
  auto consider = [&](std::vector<double> loc) {
    std::vector<double> w;
    const double v = solve_weight_lp(loc, problem, &w);
    if (v > best.value) {
      best.value = v;
      best.distribution = {loc, w};
      best.status = PrimalStatus::kFeasible;
    }
  };

  for (int r = 0; r < options.restarts; ++r) {
    auto rng = trial_rng(options.seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal(0.0, 1.5 * spread);
    for (int i = 0; i < k; ++i) gsl_vector_set(x, i, normal(rng));
    // Extremal distributions usually sit an atom on the jump at 0.
    if (r % 2 == 1) gsl_vector_set(x, 0, 0.0);
    gsl_vector_set_all(step, 0.5 * spread);
    gsl_multimin_fminimizer_set(solver, &fn, x, step);
    for (int it = 0; it < 4000; ++it) {
      if (gsl_multimin_fminimizer_iterate(solver)) break;
      if (gsl_multimin_fminimizer_size(solver) < 1e-11 * spread) break;
    }
    std::vector<double> loc(k);
    for (int i = 0; i < k; ++i) loc[i] = gsl_vector_get(solver->x, i);
    consider(loc);
    // Snap the atom nearest to 0 onto the jump.
    auto nearest = std::min_element(loc.begin(), loc.end(),
                                    [](double a, double b) { return std::abs(a) < std::abs(b); });
    *nearest = 0.0;
    consider(loc);
  }
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(solver);
  if (best.status != PrimalStatus::kFeasible) best.value = -1.0;
  return best;
}

DualityBracket duality_bracket(const MomentProblem& problem, const PrimalSearchOptions& options) {
  DualityBracket b;
  b.upper = moment_bound(problem).opt_upper;
  const auto primal = atomic_primal_search(problem, options);
  b.primal = primal.value;
  b.gap = b.upper - b.primal;
  return b;
}

TruncationCheck verify_truncation(std::uint64_t seed, int trials, double tau, int n_max) {
  require(trials >= 1 && n_max >= 1, "verify_truncation: need trials >= 1 and n_max >= 1");
  TruncationCheck chk;
  chk.trials = trials;
  const double factor = std::exp(-1.0 / tau);
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const int n = 1 + std::min(n_max - 1, static_cast<int>(uniform01(rng) * n_max));
    std::vector<RawTwoPoint> raw;
    for (int i = 0; i < n; ++i) {
      const double a = std::max(1e-3, uniform01(rng));
      const double b = std::exp(std::log(0.01) + uniform01(rng) * std::log(2000.0));  // 0.01 .. 20
      raw.push_back({a, b});
    }
    const Partition p = truncate_partition(raw, tau);
    const double exact = convolve_two_point(raw).prob_lt(1.0);
    const double reduced = exact_sum(p.transformed).prob_lt(p.transformed.xi);
    const double margin = exact - factor * reduced;
    chk.min_margin = std::min(chk.min_margin, margin);
    if (margin < -1e-12) ++chk.violations;

    double mass_a = 1.0;
    for (std::size_t i : p.A) mass_a *= raw[i].b / (raw[i].a + raw[i].b);
    chk.min_group_a_mass_ratio = std::min(chk.min_group_a_mass_ratio, mass_a / factor);
    if (mass_a < factor * (1 - 1e-12)) ++chk.violations;
  }
  return chk;
}

}  // namespace smalldev::oracle
