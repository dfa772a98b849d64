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

#include "smalldev/moment_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "smalldev/error.hpp"

namespace smalldev {

namespace {

using Gram = Eigen::Matrix<double, 5, 5>;
using Coeffs = std::array<double, 5>;

constexpr int kDim = 5;
constexpr double kGramQMinEig = 0.5;
constexpr double kMaxInflation = 1e-4;

double antidiag_sum(const Gram& v, int k) {
  double s = 0.0;
  for (int i = std::max(0, k - 4); i <= std::min(4, k); ++i) s += v(i, k - i);
  return s;
}

int antidiag_count(int k) { return std::min(4, k) - std::max(0, k - 4) + 1; }

void set_antidiag(Eigen::MatrixXd& m, int k, double value) {
  for (int i = std::max(0, k - 4); i <= std::min(4, k); ++i) m(i, k - i) = value;
}

// Coefficient targets for t^0..t^8.
std::array<double, 9> gram_targets(const Coeffs& p) {
  std::array<double, 9> t{};
  for (int l = 0; l < kDim; ++l) t[2 * l] = p[l];
  return t;
}

Coeffs plus_poly(const Coeffs& y) { return {y[0] - 1.0, y[1], y[2], y[3], y[4]}; }
Coeffs minus_poly(const Coeffs& y) { return {y[0], -y[1], y[2], -y[3], y[4]}; }

// Minimum-norm symmetric correction making every anti-diagonal sum exact.
void project(Gram& v, const Coeffs& p) {
  v = 0.5 * (v + v.transpose()).eval();
  const auto target = gram_targets(p);
  for (int k = 0; k <= 8; ++k) {
    const double r = (target[k] - antidiag_sum(v, k)) / antidiag_count(k);
    for (int i = std::max(0, k - 4); i <= std::min(4, k); ++i) v(i, k - i) += r;
  }
}

double max_residual(const Gram& v, const Coeffs& p) {
  const auto target = gram_targets(p);
  double r = 0.0;
  for (int k = 0; k <= 8; ++k) r = std::max(r, std::abs(antidiag_sum(v, k) - target[k]));
  return r;
}

// Gram of 1 + t^4 + t^8, i.e. 1 + x^2 + x^4 on either half-line. Its
// eigenvalues are 1/2 (twice), 1 and 1 +- sqrt(2)/4.
Gram gram_q() {
  Gram g = Gram::Zero();
  g(0, 0) = 1.0;
  g(1, 1) = 0.5;
  g(2, 2) = 1.0;
  g(3, 3) = 0.5;
  g(4, 4) = 1.0;
  g(0, 2) = g(2, 0) = -0.25;
  g(2, 4) = g(4, 2) = -0.25;
  return g;
}

double min_eigenvalue(const Gram& v) {
  return Eigen::SelfAdjointEigenSolver<Gram>(v, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

// LDL' with diagonal pivoting written out longhand so that certificate
// checks do not share code with the eigen-based restoration.
double min_ldlt_pivot(Gram v) {
  double min_pivot = std::numeric_limits<double>::infinity();
  std::array<int, kDim> active{0, 1, 2, 3, 4};
  int remaining = kDim;
  while (remaining > 0) {
    int best = 0;
    for (int r = 1; r < remaining; ++r)
      if (v(active[r], active[r]) > v(active[best], active[best])) best = r;
    const int p = active[best];
    const double d = v(p, p);
    min_pivot = std::min(min_pivot, d);
    std::swap(active[best], active[remaining - 1]);
    --remaining;
    if (d <= 0) {
      // A PSD matrix with zero pivot must have a zero row; anything else is
      // an indefinite direction.
      for (int r = 0; r < remaining; ++r)
        if (v(active[r], p) != 0.0) min_pivot = std::min(min_pivot, -std::abs(v(active[r], p)));
      continue;
    }
    for (int r = 0; r < remaining; ++r) {
      for (int c = 0; c < remaining; ++c) {
        const int i = active[r], j = active[c];
        v(i, j) -= v(i, p) * v(p, j) / d;
      }
    }
  }
  return min_pivot;
}

double dot(const Coeffs& a, const Coeffs& b) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += a[i] * b[i];
  return s;
}

Gram to_gram(const Eigen::MatrixXd& m) { return m; }

nlohmann::json gram_to_json(const Gram& g) {
  auto rows = nlohmann::json::array();
  for (int i = 0; i < kDim; ++i) {
    auto row = nlohmann::json::array();
    for (int j = 0; j < kDim; ++j) row.push_back(g(i, j));
    rows.push_back(row);
  }
  return rows;
}

Gram gram_from_json(const nlohmann::json& j) {
  Gram g;
  if (j.size() != kDim) fail(ErrorCode::kArgument, "certificate JSON: Gram must be 5x5");
  for (int i = 0; i < kDim; ++i) {
    if (j[i].size() != kDim) fail(ErrorCode::kArgument, "certificate JSON: Gram must be 5x5");
    for (int k = 0; k < kDim; ++k) g(i, k) = j[i][k].get<double>();
  }
  return g;
}

}  // namespace

MomentSet moment_set_from_orders(const std::vector<int>& orders) {
  std::vector<int> sorted = orders;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted == std::vector<int>{1, 2, 4}) return MomentSet::k124;
  if (sorted == std::vector<int>{1, 2, 3, 4}) return MomentSet::k1234;
  fail(ErrorCode::kArgument, "unsupported moment constraint set (expected {1,2,4} or {1,2,3,4})");
}

MomentSet moment_set_from_orders(std::initializer_list<int> orders) {
  return moment_set_from_orders(std::vector<int>(orders));
}

std::string to_string(MomentSet set) { return set == MomentSet::k124 ? "124" : "1234"; }

std::array<double, 5> moment_vector(const MomentProblem& problem) {
  const auto& m = problem.moments;
  return {1.0, m.M1, m.M2, problem.set == MomentSet::k1234 ? m.L3 : 0.0, m.B4};
}

DualSdp assemble_dual_sdp(const MomentProblem& problem) {
  const auto& mom = problem.moments;
  require(std::isfinite(mom.M1) && std::isfinite(mom.M2) && mom.M2 > 0 && std::isfinite(mom.B4),
          "assemble_dual_sdp: moments must be finite with M2 > 0");
  const bool with_m3 = problem.set == MomentSet::k1234;

  DualSdp out;
  out.set = problem.set;
  out.scale = std::sqrt(mom.M2);
  const double sc = out.scale;
  const Coeffs m = {1.0, mom.M1 / sc, mom.M2 / (sc * sc), with_m3 ? mom.L3 / (sc * sc * sc) : 0.0,
                    mom.B4 / (sc * sc * sc * sc)};

  auto& p = out.sdp;
  p = sdp::Problem::empty({kDim, kDim}, with_m3 ? 1 : 0);
  for (int l = 0; l < kDim; ++l) set_antidiag(p.C.blocks[0], 2 * l, m[l]);
  out.objective_offset = 1.0;

  for (int k = 1; k <= 7; k += 2) {
    set_antidiag(p.add_constraint(0.0).blocks[0], k, 1.0);
    set_antidiag(p.add_constraint(0.0).blocks[1], k, 1.0);
  }
  // Even anti-diagonals of the minus block carry (-1)^l y_l, y_0 = A_0(V+) + 1.
  for (int l = 0; l < kDim; ++l) {
    if (l == 3 && !with_m3) {
      set_antidiag(p.add_constraint(0.0).blocks[0], 6, 1.0);
      set_antidiag(p.add_constraint(0.0).blocks[1], 6, 1.0);
      continue;
    }
    auto& a = p.add_constraint(l == 0 ? 1.0 : 0.0);
    set_antidiag(a.blocks[1], 2 * l, 1.0);
    set_antidiag(a.blocks[0], 2 * l, l % 2 == 0 ? -1.0 : 1.0);
  }
  if (with_m3) {
    // y3 = A_6(V+) <= 0 via a nonnegative slack.
    auto& a = p.add_constraint(0.0);
    set_antidiag(a.blocks[0], 6, 1.0);
    a.lp(0) = 1.0;
  }
  return out;
}

DualCertificate restore_certificate(const Coeffs& y_in, const Gram& gram_plus, const Gram& gram_minus,
                                    const MomentProblem& problem) {
  const Coeffs m = moment_vector(problem);
  DualCertificate c;
  c.y = y_in;
  if (problem.set == MomentSet::k124) {
    c.y[3] = 0.0;
  } else {
    c.y[3] = std::min(c.y[3], 0.0);
  }
  c.y[4] = std::max(c.y[4], 0.0);
  c.gram_plus = gram_plus;
  c.gram_minus = gram_minus;
  project(c.gram_plus, plus_poly(c.y));
  project(c.gram_minus, minus_poly(c.y));
  const double objective_before = dot(c.y, m);

  const double eps = std::numeric_limits<double>::epsilon();
  double delta = 0.0;
  for (const Gram* g : {&c.gram_plus, &c.gram_minus}) {
    const double margin = 64 * eps * std::max(1.0, g->norm());
    const double lam = min_eigenvalue(*g);
    if (lam < margin) delta = std::max(delta, (margin - lam) / kGramQMinEig);
  }
  if (delta > 0) {
    const Gram q = gram_q();
    for (int l : {0, 2, 4}) c.y[l] += delta;
    c.gram_plus += delta * q;
    c.gram_minus += delta * q;
    project(c.gram_plus, plus_poly(c.y));
    project(c.gram_minus, minus_poly(c.y));
  }
  c.objective = dot(c.y, m);

  auto& r = c.residuals;
  r.restoration_shift = delta;
  r.objective_inflation = c.objective - objective_before;
  r.plus_linear = max_residual(c.gram_plus, plus_poly(c.y));
  r.minus_linear = max_residual(c.gram_minus, minus_poly(c.y));
  r.plus_min_pivot = min_ldlt_pivot(c.gram_plus);
  r.minus_min_pivot = min_ldlt_pivot(c.gram_minus);

  if (r.objective_inflation > kMaxInflation)
    fail(ErrorCode::kCertificateDegraded,
         "restore_certificate: restoration raised the objective by " +
             std::to_string(r.objective_inflation));
  if (r.plus_min_pivot < 0 || r.minus_min_pivot < 0)
    fail(ErrorCode::kNumerical, "restore_certificate: Gram matrix not PSD after restoration");
  return c;
}

double dual_polynomial(const Coeffs& y, double x) {
  return y[0] + x * (y[1] + x * (y[2] + x * (y[3] + x * y[4])));
}

CertificateCheck verify_certificate(const DualCertificate& cert, const MomentProblem& problem,
                                    std::uint64_t seed, int samples) {
  CertificateCheck chk;
  chk.max_linear_residual = std::max(max_residual(cert.gram_plus, plus_poly(cert.y)),
                                     max_residual(cert.gram_minus, minus_poly(cert.y)));
  const bool symmetric = (cert.gram_plus - cert.gram_plus.transpose()).cwiseAbs().maxCoeff() <= 1e-12 &&
                         (cert.gram_minus - cert.gram_minus.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
  chk.min_pivot = std::min(min_ldlt_pivot(cert.gram_plus), min_ldlt_pivot(cert.gram_minus));

  bool signs = cert.y[4] >= 0;
  if (problem.set == MomentSet::k124) signs = signs && cert.y[3] == 0.0;
  else signs = signs && cert.y[3] <= 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-50.0, 50.0);
  chk.min_pointwise = dual_polynomial(cert.y, 0.0) - 1.0;
  for (int i = 0; i < samples; ++i) {
    const double x = unif(rng);
    chk.min_pointwise = std::min(chk.min_pointwise, dual_polynomial(cert.y, x) - (x >= 0 ? 1.0 : 0.0));
  }
  chk.objective_error = std::abs(dot(cert.y, moment_vector(problem)) - cert.objective);

  chk.ok = true;
  auto check = [&](bool cond, const char* what) {
    if (!cond) {
      chk.ok = false;
      if (!chk.message.empty()) chk.message += "; ";
      chk.message += what;
    }
  };
  check(symmetric, "Gram matrices not symmetric");
  check(chk.max_linear_residual <= 1e-9, "linear identities violated");
  check(chk.min_pivot >= 0, "negative LDL' pivot");
  check(signs, "sign constraints on y3/y4 violated");
  check(chk.min_pointwise >= -1e-8, "polynomial below the indicator");
  check(chk.objective_error <= 1e-12 * std::max(1.0, std::abs(cert.objective)), "objective mismatch");
  return chk;
}

MomentBound moment_bound(const MomentProblem& problem) {
  const DualSdp dual = assemble_dual_sdp(problem);
  const sdp::Solution sol = sdp::solve(dual.sdp);

  // Back to Z coordinates: y_l = yhat_l / s^l, V = S Vhat S with
  // S = diag(s^{-i/2}).
  const double sc = dual.scale;
  const Gram vp = to_gram(sol.X.blocks[0]);
  const Gram vm = to_gram(sol.X.blocks[1]);
  Coeffs y{};
  for (int l = 0; l < kDim; ++l) y[l] = (antidiag_sum(vp, 2 * l) + (l == 0 ? 1.0 : 0.0)) / std::pow(sc, l);
  Eigen::Matrix<double, 5, 1> sdiag;
  for (int i = 0; i < kDim; ++i) sdiag(i) = std::pow(sc, -0.5 * i);
  const Gram gp = sdiag.asDiagonal() * vp * sdiag.asDiagonal();
  const Gram gm = sdiag.asDiagonal() * vm * sdiag.asDiagonal();

  MomentBound out;
  out.solver_status = sol.status;
  out.solver_iterations = sol.iterations;
  out.certificate = restore_certificate(y, gp, gm, problem);
  if (out.certificate.objective >= 1.0) {
    // g == 1 is always a valid certificate for the trivial bound.
    DualCertificate trivial;
    trivial.y = {1.0, 0.0, 0.0, 0.0, 0.0};
    trivial.gram_minus(0, 0) = 1.0;
    trivial.objective = 1.0;
    trivial.residuals.plus_min_pivot = 0.0;
    trivial.residuals.minus_min_pivot = 0.0;
    out.certificate = trivial;
  }
  out.opt_upper = std::clamp(out.certificate.objective, 0.0, 1.0);
  out.probability_lower = std::floor(std::max(0.0, 1.0 - out.opt_upper) * 1e6) / 1e6;
  return out;
}

MomentBound moment_bound(double xi, double D, MomentSet set, M3Mode mode) {
  return moment_bound(MomentProblem{shifted_moments(xi, D, mode), set});
}

std::string certificate_to_json(const DualCertificate& cert, const MomentProblem& problem) {
  nlohmann::json j;
  j["y"] = cert.y;
  j["gram_plus"] = gram_to_json(cert.gram_plus);
  j["gram_minus"] = gram_to_json(cert.gram_minus);
  j["objective"] = cert.objective;
  const auto& r = cert.residuals;
  j["residuals"] = {{"plus_linear", r.plus_linear},
                    {"minus_linear", r.minus_linear},
                    {"plus_min_pivot", r.plus_min_pivot},
                    {"minus_min_pivot", r.minus_min_pivot},
                    {"restoration_shift", r.restoration_shift},
                    {"objective_inflation", r.objective_inflation}};
  const auto& m = problem.moments;
  j["problem"] = {{"moments", to_string(problem.set)},
                  {"xi", m.xi},
                  {"D", m.D},
                  {"M1", m.M1},
                  {"M2", m.M2},
                  {"L3", m.L3},
                  {"B4", m.B4}};
  return j.dump(2);
}

DualCertificate certificate_from_json(const std::string& text) {
  DualCertificate c;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto y = j.at("y").get<std::vector<double>>();
    if (y.size() != kDim) fail(ErrorCode::kArgument, "certificate JSON: y must have 5 entries");
    std::copy(y.begin(), y.end(), c.y.begin());
    c.gram_plus = gram_from_json(j.at("gram_plus"));
    c.gram_minus = gram_from_json(j.at("gram_minus"));
    c.objective = j.at("objective").get<double>();
    if (j.contains("residuals")) {
      const auto& r = j["residuals"];
      c.residuals.plus_linear = r.value("plus_linear", 0.0);
      c.residuals.minus_linear = r.value("minus_linear", 0.0);
      c.residuals.plus_min_pivot = r.value("plus_min_pivot", 0.0);
      c.residuals.minus_min_pivot = r.value("minus_min_pivot", 0.0);
      c.residuals.restoration_shift = r.value("restoration_shift", 0.0);
      c.residuals.objective_inflation = r.value("objective_inflation", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kArgument, std::string("certificate JSON: ") + e.what());
  }
  return c;
}

MomentProblem problem_from_certificate_json(const std::string& text) {
  MomentProblem p;
  try {
    const auto j = nlohmann::json::parse(text).at("problem");
    const auto set = j.at("moments").get<std::string>();
    if (set == "124") p.set = MomentSet::k124;
    else if (set == "1234") p.set = MomentSet::k1234;
    else fail(ErrorCode::kArgument, "certificate JSON: unknown moment set " + set);
    auto& m = p.moments;
    m.xi = j.at("xi").get<double>();
    m.D = j.at("D").get<double>();
    m.M1 = j.at("M1").get<double>();
    m.M2 = j.at("M2").get<double>();
    m.L3 = j.at("L3").get<double>();
    m.B4 = j.at("B4").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kArgument, std::string("certificate JSON: ") + e.what());
  }
  return p;
}

}  // namespace smalldev
