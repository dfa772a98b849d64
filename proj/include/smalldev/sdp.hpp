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

// Small dense semidefinite programs in standard primal form
//
//   minimize   <C, X>
//   subject to <A_i, X> = b_i,  i = 1..m
//              X = diag(X_1, ..., X_k, x_lp),  X_s PSD,  x_lp >= 0
//
// with dual  maximize b'w  subject to  C - sum_i w_i A_i = Z,  Z in the cone.
// Sized for blocks of a handful of rows and a couple dozen constraints.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smalldev::sdp {

/// A point in (or a linear functional on) the block-diagonal cone.
struct BlockVector {
  std::vector<Eigen::MatrixXd> blocks;  // symmetric
  Eigen::VectorXd lp;

  static BlockVector zeros(const std::vector<int>& block_sizes, int lp_size);
  static BlockVector identity(const std::vector<int>& block_sizes, int lp_size);
};

double inner(const BlockVector& a, const BlockVector& b);

struct Problem {
  std::vector<int> block_sizes;
  int lp_size = 0;
  BlockVector C;
  std::vector<BlockVector> A;
  Eigen::VectorXd b;

  int num_constraints() const { return static_cast<int>(A.size()); }
  /// Zeroed objective and no constraints with the given cone layout.
  static Problem empty(std::vector<int> block_sizes, int lp_size);
  /// Appends the zero constraint functional and returns it for filling.
  BlockVector& add_constraint(double rhs);
};

enum class Status { kOptimal, kMaxIter, kStalled };
std::string to_string(Status s);

struct Options {
  double mu_tol = 1e-10;       // duality measure <X,Z>/nu
  double feas_tol = 1e-10;     // relative primal and dual infeasibility
  int max_iter = 200;
};

struct Solution {
  BlockVector X;
  BlockVector Z;
  Eigen::VectorXd w;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double mu = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  Status status = Status::kMaxIter;
};

/// Infeasible primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector). Deterministic for fixed input.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace smalldev::sdp
