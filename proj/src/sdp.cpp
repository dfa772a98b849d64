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

#include "smalldev/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smalldev::sdp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double frob(const BlockVector& v) { return std::sqrt(inner(v, v)); }

void axpy(BlockVector& y, double alpha, const BlockVector& x) {
  for (std::size_t s = 0; s < y.blocks.size(); ++s) y.blocks[s] += alpha * x.blocks[s];
  y.lp += alpha * x.lp;
}

VectorXd apply_A(const Problem& p, const BlockVector& X) {
  VectorXd out(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) out(i) = inner(p.A[i], X);
  return out;
}

BlockVector apply_At(const Problem& p, const VectorXd& w) {
  BlockVector out = BlockVector::zeros(p.block_sizes, p.lp_size);
  for (int i = 0; i < p.num_constraints(); ++i) axpy(out, w(i), p.A[i]);
  return out;
}

// Largest step keeping X + alpha dX in the cone (may be +inf). Returns a
// negative value when X itself is not positive definite.
double max_step(const BlockVector& X, const BlockVector& dX) {
  double alpha = kInf;
  for (std::size_t s = 0; s < X.blocks.size(); ++s) {
    Eigen::LLT<MatrixXd> llt(X.blocks[s]);
    if (llt.info() != Eigen::Success) return -1.0;
    const MatrixXd L = llt.matrixL();
    MatrixXd tmp = L.triangularView<Eigen::Lower>().solve(dX.blocks[s]);
    tmp = L.triangularView<Eigen::Lower>().solve(tmp.transpose()).transpose();
    const double lam = Eigen::SelfAdjointEigenSolver<MatrixXd>(sym(tmp), Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .minCoeff();
    if (lam < 0) alpha = std::min(alpha, -1.0 / lam);
  }
  for (Eigen::Index k = 0; k < X.lp.size(); ++k) {
    if (X.lp(k) <= 0) return -1.0;
    if (dX.lp(k) < 0) alpha = std::min(alpha, -X.lp(k) / dX.lp(k));
  }
  return alpha;
}

struct Workspace {
  std::vector<MatrixXd> Zinv;
  VectorXd z_inv_lp;
  // G[j].blocks[s] = X_s A_js Zinv_s, G[j].lp = x .* a_j ./ z
  std::vector<BlockVector> G;
  Eigen::LDLT<MatrixXd> schur;
  Eigen::FullPivLU<MatrixXd> schur_lu;
  bool use_lu = false;
};

bool prepare(const Problem& p, const BlockVector& X, const BlockVector& Z, Workspace& ws) {
  const std::size_t nb = p.block_sizes.size();
  ws.Zinv.resize(nb);
  for (std::size_t s = 0; s < nb; ++s) {
    Eigen::LLT<MatrixXd> llt(Z.blocks[s]);
    if (llt.info() != Eigen::Success) return false;
    ws.Zinv[s] = sym(llt.solve(MatrixXd::Identity(p.block_sizes[s], p.block_sizes[s])));
  }
  if ((Z.lp.array() <= 0).any()) return false;
  ws.z_inv_lp = Z.lp.cwiseInverse();

  const int m = p.num_constraints();
  ws.G.assign(m, BlockVector{});
  for (int j = 0; j < m; ++j) {
    ws.G[j].blocks.resize(nb);
    for (std::size_t s = 0; s < nb; ++s) ws.G[j].blocks[s] = X.blocks[s] * p.A[j].blocks[s] * ws.Zinv[s];
    ws.G[j].lp = X.lp.cwiseProduct(p.A[j].lp).cwiseProduct(ws.z_inv_lp);
  }
  MatrixXd M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = p.A[i].lp.dot(ws.G[j].lp);
      for (std::size_t s = 0; s < nb; ++s)
        v += p.A[i].blocks[s].cwiseProduct(ws.G[j].blocks[s].transpose()).sum();
      M(i, j) = v;
    }
  }
  M = sym(M);
  ws.schur.compute(M);
  ws.use_lu = ws.schur.info() != Eigen::Success || !ws.schur.isPositive() ||
              (ws.schur.vectorD().array() <= 0).any();
  if (ws.use_lu) ws.schur_lu.compute(M);
  return true;
}

struct Direction {
  BlockVector dX;
  BlockVector dZ;
  VectorXd dw;
};

// Solves for the direction whose X-component is R - sym(X dZ Zinv).
Direction direction(const Problem& p, const BlockVector& X, const Workspace& ws,
                    const VectorXd& rp, const BlockVector& Rd, const BlockVector& R) {
  const std::size_t nb = p.block_sizes.size();
  BlockVector XRdZinv;
  XRdZinv.blocks.resize(nb);
  for (std::size_t s = 0; s < nb; ++s) XRdZinv.blocks[s] = X.blocks[s] * Rd.blocks[s] * ws.Zinv[s];
  XRdZinv.lp = X.lp.cwiseProduct(Rd.lp).cwiseProduct(ws.z_inv_lp);

  const VectorXd rhs = rp - apply_A(p, R) + apply_A(p, XRdZinv);
  Direction d;
  d.dw = ws.use_lu ? VectorXd(ws.schur_lu.solve(rhs)) : VectorXd(ws.schur.solve(rhs));
  d.dZ = Rd;
  axpy(d.dZ, -1.0, apply_At(p, d.dw));
  d.dX.blocks.resize(nb);
  for (std::size_t s = 0; s < nb; ++s)
    d.dX.blocks[s] = R.blocks[s] - sym(X.blocks[s] * d.dZ.blocks[s] * ws.Zinv[s]);
  d.dX.lp = R.lp - X.lp.cwiseProduct(d.dZ.lp).cwiseProduct(ws.z_inv_lp);
  return d;
}

}  // namespace

BlockVector BlockVector::zeros(const std::vector<int>& block_sizes, int lp_size) {
  BlockVector v;
  for (int n : block_sizes) v.blocks.push_back(MatrixXd::Zero(n, n));
  v.lp = VectorXd::Zero(lp_size);
  return v;
}

BlockVector BlockVector::identity(const std::vector<int>& block_sizes, int lp_size) {
  BlockVector v;
  for (int n : block_sizes) v.blocks.push_back(MatrixXd::Identity(n, n));
  v.lp = VectorXd::Ones(lp_size);
  return v;
}

double inner(const BlockVector& a, const BlockVector& b) {
  double v = a.lp.dot(b.lp);
  for (std::size_t s = 0; s < a.blocks.size(); ++s) v += a.blocks[s].cwiseProduct(b.blocks[s]).sum();
  return v;
}

Problem Problem::empty(std::vector<int> block_sizes, int lp_size) {
  Problem p;
  p.block_sizes = std::move(block_sizes);
  p.lp_size = lp_size;
  p.C = BlockVector::zeros(p.block_sizes, lp_size);
  p.b = VectorXd::Zero(0);
  return p;
}

BlockVector& Problem::add_constraint(double rhs) {
  A.push_back(BlockVector::zeros(block_sizes, lp_size));
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
  return A.back();
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kMaxIter: return "maxiter";
    case Status::kStalled: return "stalled";
  }
  return "unknown";
}

Solution solve(const Problem& p, const Options& opt) {
  const int m = p.num_constraints();
  double nu = p.lp_size;
  for (int n : p.block_sizes) nu += n;

  double max_a = 0.0;
  double x0 = std::max(10.0, std::sqrt(nu));
  for (int i = 0; i < m; ++i) {
    const double na = frob(p.A[i]);
    max_a = std::max(max_a, na);
    x0 = std::max(x0, nu * (1.0 + std::abs(p.b(i))) / (1.0 + na));
  }
  const double normC = frob(p.C);
  const double normb = p.b.norm();
  const double z0 = std::max({10.0, std::sqrt(nu), max_a, normC});

  BlockVector X = BlockVector::identity(p.block_sizes, p.lp_size);
  BlockVector Z = X;
  for (auto& blk : X.blocks) blk *= x0;
  X.lp *= x0;
  for (auto& blk : Z.blocks) blk *= z0;
  Z.lp *= z0;
  VectorXd w = VectorXd::Zero(m);

  Solution sol;
  Workspace ws;
  int slow_steps = 0;
  for (int it = 0;; ++it) {
    const VectorXd rp = p.b - apply_A(p, X);
    BlockVector Rd = p.C;
    axpy(Rd, -1.0, apply_At(p, w));
    axpy(Rd, -1.0, Z);
    const double mu = inner(X, Z) / nu;

    sol.X = X;
    sol.Z = Z;
    sol.w = w;
    sol.mu = mu;
    sol.primal_objective = inner(p.C, X);
    sol.dual_objective = p.b.dot(w);
    sol.primal_infeasibility = rp.norm() / (1.0 + normb);
    sol.dual_infeasibility = frob(Rd) / (1.0 + normC);
    sol.iterations = it;

    if (mu <= opt.mu_tol && sol.primal_infeasibility <= opt.feas_tol &&
        sol.dual_infeasibility <= opt.feas_tol) {
      sol.status = Status::kOptimal;
      return sol;
    }
    if (it >= opt.max_iter) {
      sol.status = Status::kMaxIter;
      return sol;
    }
    if (!prepare(p, X, Z, ws)) {
      sol.status = Status::kStalled;
      return sol;
    }

    // Predictor: affine scaling direction.
    BlockVector R = X;
    for (auto& blk : R.blocks) blk = -blk;
    R.lp = -R.lp;
    const Direction pred = direction(p, X, ws, rp, Rd, R);
    const double ap = std::min(1.0, max_step(X, pred.dX));
    const double ad = std::min(1.0, max_step(Z, pred.dZ));
    if (ap < 0 || ad < 0) {
      sol.status = Status::kStalled;
      return sol;
    }
    BlockVector Xa = X, Za = Z;
    axpy(Xa, ap, pred.dX);
    axpy(Za, ad, pred.dZ);
    const double ratio = std::max(0.0, inner(Xa, Za) / inner(X, Z));
    const double sigma = std::min(1.0, ratio * ratio * ratio);

    // Corrector with the second-order term.
    for (std::size_t s = 0; s < R.blocks.size(); ++s) {
      R.blocks[s] = sigma * mu * ws.Zinv[s] - X.blocks[s] -
                    sym(pred.dX.blocks[s] * pred.dZ.blocks[s] * ws.Zinv[s]);
    }
    R.lp = (sigma * mu * ws.z_inv_lp - X.lp -
            pred.dX.lp.cwiseProduct(pred.dZ.lp).cwiseProduct(ws.z_inv_lp))
               .eval();
    const Direction corr = direction(p, X, ws, rp, Rd, R);

    const double gamma = 0.9 + 0.09 * std::min(ap, ad);
    const double step_p = std::min(1.0, gamma * max_step(X, corr.dX));
    const double step_d = std::min(1.0, gamma * max_step(Z, corr.dZ));
    if (step_p <= 0 || step_d <= 0) {
      sol.status = Status::kStalled;
      return sol;
    }
    axpy(X, step_p, corr.dX);
    axpy(Z, step_d, corr.dZ);
    w += step_d * corr.dw;
    for (auto& blk : X.blocks) blk = sym(blk);
    for (auto& blk : Z.blocks) blk = sym(blk);

    slow_steps = (std::max(step_p, step_d) < 1e-8) ? slow_steps + 1 : 0;
    if (slow_steps >= 5) {
      sol.status = Status::kStalled;
      return sol;
    }
  }
}

}  // namespace smalldev::sdp
