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

// Upper bounds on Prob[Z >= 0] over all distributions matching a few
// moments of Z, certified by sum-of-squares polynomials.
//
// The dual asks for g(x) = y0 + y1 x + y2 x^2 + y3 x^3 + y4 x^4 with
//   g(x) - 1 >= 0 on x >= 0   and   g(x) >= 0 on x <= 0,
// minimizing y . (1, M1, M2, L3, B4). Each half-line condition is encoded
// with a 5x5 Gram matrix V in the basis (1, t, ..., t^4), x = t^2 (resp.
// x = -t^2): odd anti-diagonal sums of V vanish and the even ones give the
// polynomial coefficients.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smalldev/model.hpp"
#include "smalldev/sdp.hpp"

namespace smalldev {

enum class MomentSet {
  k124,   // E[Z], E[Z^2] fixed, E[Z^4] <= B4
  k1234,  // additionally E[Z^3] >= L3
};

/// Maps an order list such as {1, 2, 4} onto a MomentSet. Throws
/// Error(kArgument) for anything other than {1,2,4} or {1,2,3,4}.
MomentSet moment_set_from_orders(std::initializer_list<int> orders);
MomentSet moment_set_from_orders(const std::vector<int>& orders);
std::string to_string(MomentSet set);

struct MomentProblem {
  ShiftedMoments moments;
  MomentSet set = MomentSet::k124;
};

/// Coefficients of the moment functional (1, M1, M2, L3, B4); the order-3
/// entry is zero for MP(1,2,4).
std::array<double, 5> moment_vector(const MomentProblem& problem);

struct DualSdp {
  sdp::Problem sdp;
  double scale = 1.0;  // solved in u = Z / scale
  MomentSet set = MomentSet::k124;
  // Constant term of the objective; <C, X> + objective_offset is y . m.
  double objective_offset = 1.0;
};

/// Block 0 is the x >= 0 Gram, block 1 the x <= 0 Gram; MP(1,2,3,4) adds one
/// LP slack carrying the sign of y3.
DualSdp assemble_dual_sdp(const MomentProblem& problem);

struct CertificateResiduals {
  double plus_linear = 0.0;   // max |identity residual| on the x >= 0 block
  double minus_linear = 0.0;
  double plus_min_pivot = 0.0;
  double minus_min_pivot = 0.0;
  double restoration_shift = 0.0;  // delta added along 1 + x^2 + x^4
  double objective_inflation = 0.0;
};

struct DualCertificate {
  std::array<double, 5> y{};
  Eigen::Matrix<double, 5, 5> gram_plus = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 5> gram_minus = Eigen::Matrix<double, 5, 5>::Zero();
  double objective = 0.0;
  CertificateResiduals residuals;
};

/// Turns approximate solver output into an exact certificate: projects both
/// Gram matrices onto their linear identities, then adds delta * (1 + x^2 +
/// x^4) (Gram with smallest eigenvalue 1/2 on both half-lines) until both
/// blocks are safely positive definite. Throws Error(kCertificateDegraded)
/// if that raises the objective by more than 1e-4.
DualCertificate restore_certificate(const std::array<double, 5>& y,
                                    const Eigen::Matrix<double, 5, 5>& gram_plus,
                                    const Eigen::Matrix<double, 5, 5>& gram_minus,
                                    const MomentProblem& problem);

struct CertificateCheck {
  bool ok = false;
  double max_linear_residual = 0.0;
  double min_pivot = 0.0;
  double min_pointwise = 0.0;   // min of g(x) - 1{x >= 0} over the samples
  double objective_error = 0.0; // |y . m - objective|
  std::string message;
};

/// Independent re-check of a certificate: identities to 1e-9, nonnegative
/// pivots of a diagonally pivoted LDL', sign constraints on y3 / y4, and
/// g(x) - 1{x >= 0} >= -1e-8 on `samples` random points in [-50, 50].
CertificateCheck verify_certificate(const DualCertificate& cert, const MomentProblem& problem,
                                    std::uint64_t seed = 7, int samples = 1000);

struct MomentBound {
  double opt_upper = 1.0;          // certified upper bound on Prob[Z >= 0]
  double probability_lower = 0.0;  // 1 - opt_upper, floored to 6 decimals
  DualCertificate certificate;
  double gap = -1.0;               // filled by callers that run the primal search
  sdp::Status solver_status = sdp::Status::kOptimal;
  int solver_iterations = 0;
};

/// Solves, restores and rounds. F2 for MP(1,2,4), F4 / F4-hat for
/// MP(1,2,3,4) depending on `mode`.
MomentBound moment_bound(double xi, double D, MomentSet set, M3Mode mode = M3Mode::basic());
MomentBound moment_bound(const MomentProblem& problem);

std::string certificate_to_json(const DualCertificate& cert, const MomentProblem& problem);
/// Reads the certificate part of certificate_to_json output.
DualCertificate certificate_from_json(const std::string& text);
/// The "problem" section of a certificate document.
MomentProblem problem_from_certificate_json(const std::string& text);

/// Evaluates y0 + y1 x + ... + y4 x^4.
double dual_polynomial(const std::array<double, 5>& y, double x);

}  // namespace smalldev
