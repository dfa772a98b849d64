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

#include "smalldev/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smalldev/error.hpp"

namespace smalldev {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kArgument: return "argument error";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kNoIntersection: return "no intersection";
    case ErrorCode::kNumerical: return "numerical failure";
    case ErrorCode::kCertificateDegraded: return "certificate degraded";
    case ErrorCode::kSize: return "size error";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kVerification: return "verification failure";
  }
  return "unknown error";
}

namespace numerics {

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::kDomain, "std_normal_cdf: non-finite input");
  // erfc keeps full relative precision in the lower tail, where 1 + erf
  // would cancel.
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    fail(ErrorCode::kArgument, "maximize_scalar: invalid bracket");
  require(tol > 0, "maximize_scalar: tol must be positive");

  constexpr int kGrid = 200;
  const double h = (hi - lo) / (kGrid - 1);
  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i < kGrid; ++i) {
    const double v = f(lo + i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  ScalarMax out{lo + best * h, best_val};

  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(kGrid - 1, best + 1) * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = f(mid);
  for (auto [x, v] : {std::pair{c, fc}, std::pair{d, fd}, std::pair{mid, fmid}}) {
    if (v > out.value) out = {x, v};
  }
  return out;
}

double bisect_crossing(const std::function<double(double)>& g, double lo,
                       double hi, double tol) {
  if (!(lo < hi)) fail(ErrorCode::kArgument, "bisect_crossing: invalid bracket");
  require(tol > 0, "bisect_crossing: tol must be positive");

  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo < 0) == (ghi < 0))
    fail(ErrorCode::kNoIntersection, "bisect_crossing: no sign change in bracket");

  // Sampled monotonicity check. A small slack absorbs solver noise in g.
  constexpr int kSamples = 9;
  const double dir = ghi > glo ? 1.0 : -1.0;
  const double slack = 1e-9 * std::max({1.0, std::abs(glo), std::abs(ghi)});
  double prev = glo;
  for (int i = 1; i < kSamples; ++i) {
    const double v = g(lo + (hi - lo) * i / kSamples);
    if (dir * (v - prev) < -slack)
      fail(ErrorCode::kArgument, "bisect_crossing: function is not monotone on the bracket");
    prev = v;
  }

  double a = lo, b = hi;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm < 0) == (glo < 0)) {
      a = m;
      glo = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace numerics
}  // namespace smalldev
