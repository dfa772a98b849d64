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

// Ground truth that shares no code path with the bound pipeline: exact
// distributions of sums of two-point variables, random-instance checks of
// the claimed bounds, and a primal search over atomic distributions that
// brackets the SDP value from below.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "smalldev/model.hpp"
#include "smalldev/moment_sdp.hpp"

namespace smalldev::oracle {

struct Atom {
  double value;
  double prob;
};

/// Sorted, merged atoms of a discrete distribution.
struct SumDistribution {
  std::vector<Atom> atoms;

  double total_mass() const;
  /// Prob[S <= t], atoms within the merge tolerance of t count as equal.
  double prob_le(double t) const;
  /// Prob[S < t], atoms within the merge tolerance of t are excluded.
  double prob_lt(double t) const;
  /// E[(S - shift)^r]
  double moment(int r, double shift = 0.0) const;
};

inline constexpr double kMergeTolerance = 1e-12;
inline constexpr std::size_t kMaxExactVars = 24;

/// Distribution of a sum of independent -a / +b variables (no range
/// restrictions). Throws Error(kSize) beyond kMaxExactVars nondegenerate
/// variables.
SumDistribution convolve_two_point(std::span<const RawTwoPoint> vars);
SumDistribution exact_sum(const Instance& instance);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double lo = 0.0;  // 3-sigma band
  double hi = 0.0;
  std::uint64_t samples = 0;
};

MonteCarloEstimate monte_carlo_prob_le(const Instance& instance, double t, std::uint64_t samples,
                                       std::uint64_t seed);

/// Independent stream for trial `index` of a run seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index);
/// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng);

/// n ~ U{1..n_max}, a ~ U[0, xi], b ~ U[0, 1].
Instance random_instance(std::mt19937_64& rng, int n_max, double xi);

struct Claim {
  std::string name;
  double omega;  // claimed lower bound on Prob[sum Y <= xi]
};

/// omega = e^{xi} * bound_value for every pipeline variant.
std::vector<Claim> pipeline_claims(double xi);

struct Violation {
  std::string source;  // "trial 17", "adversarial n=5", ...
  std::string claim;
  double probability;
  double omega;
  Instance instance;
};

struct VerificationReport {
  std::uint64_t seed = 0;
  int trials = 0;
  int n_max = 0;
  double xi = 0.0;
  std::vector<Claim> claims;
  std::vector<Violation> violations;
  int instances_checked = 0;
  int monte_carlo_instances = 0;
  int monte_carlo_suspects = 0;  // estimate band below a claim; never fatal
  double min_probability = 1.0;
  double max_gap = -1.0;  // duality gap at the operating points, when measured

  bool ok() const { return violations.empty(); }
};

/// Checks exact Prob[sum Y <= xi] >= omega - 1e-9 for every claim on
/// `trials` random instances plus the adversarial family (xi, 1) x n and the
/// all-zero instance.
VerificationReport verify_bounds(std::uint64_t seed, int trials, int n_max, double xi,
                                 const std::vector<Claim>& claims);
VerificationReport verify_bounds(std::uint64_t seed, int trials, int n_max, double xi);

std::string verification_to_json(const VerificationReport& report);

struct MomentFormulaReport {
  std::uint64_t seed = 0;
  int trials = 0;
  double max_relative_error = 0.0;
  bool bounds_hold = true;  // L3 <= E[Z^3] and E[Z^4] <= B4 everywhere
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Compares enumerated E[Z^2], E[Z^3], E[Z^4] (Z = sum Y - xi) against the
/// closed-form expansions on random instances with n <= 10.
MomentFormulaReport verify_moment_formulas(std::uint64_t seed, int trials, double tolerance = 1e-10);

struct AtomicDistribution {
  std::vector<double> locations;
  std::vector<double> weights;
};

enum class PrimalStatus { kFeasible, kInfeasibleNotProven };

struct PrimalResult {
  double value = -1.0;  // best Prob[Z >= 0] found; a lower bound on opt
  AtomicDistribution distribution;
  PrimalStatus status = PrimalStatus::kInfeasibleNotProven;
};

struct PrimalSearchOptions {
  int restarts = 40;
  std::uint64_t seed = 1;
  int atoms = 0;  // 0: one per constraint including order 0
};

/// Best weights for fixed atom locations (exact vertex enumeration of the
/// weight LP). value is -1 and status infeasible when no weights fit.
PrimalResult evaluate_locations(const std::vector<double>& locations, const MomentProblem& problem);

/// Random-restart Nelder-Mead over atom locations; weights for fixed
/// locations come from an exact vertex enumeration of the weight LP. B4 may
/// be +inf to drop the fourth-moment constraint.
PrimalResult atomic_primal_search(const MomentProblem& problem, const PrimalSearchOptions& options = {});

struct DualityBracket {
  double primal = 0.0;
  double upper = 1.0;
  double gap = 0.0;
};

DualityBracket duality_bracket(const MomentProblem& problem, const PrimalSearchOptions& options = {});

struct TruncationCheck {
  int trials = 0;
  int violations = 0;
  double min_margin = 1.0;  // min of exact - e^{-1/tau} * transformed
  double min_group_a_mass_ratio = 1.0;  // min of Prob[sum_A X = -a] / e^{-1/tau}
};

/// End-to-end check of the truncation reduction on random raw instances:
/// Prob[sum X < 1] >= e^{-1/tau} Prob[sum_B Y < 1/tau] and
/// Prob[sum_A X = -a_sum] >= e^{-1/tau}.
TruncationCheck verify_truncation(std::uint64_t seed, int trials, double tau, int n_max = 10);

}  // namespace smalldev::oracle
