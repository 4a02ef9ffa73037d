// Copyright 2026 The posroute Authors
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

// Dense revised simplex for
//
//   minimize c'x  subject to  A x <= b,  x >= 0,  with b >= 0.
//
// b >= 0 makes the all-slack basis feasible, so no phase I is needed. Pivots
// follow Bland's rule (lowest-index entering column, lowest-index leaving
// variable among ratio ties), which rules out cycling and makes the returned
// vertex a deterministic function of the input.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "posroute/error.hpp"

namespace posroute {

struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double objective_offset = 0.0;  // added to c'x in reports

  Eigen::Index num_vars() const { return c.size(); }
  Eigen::Index num_rows() const { return b.size(); }
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int max_iterations = 200'000;
  int refactor_interval = 64;
};

enum class LpStatus { kOptimal, kUnbounded, kMaxIterations };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  double objective = 0.0;  // includes objective_offset
  Eigen::VectorXd x;
  Eigen::VectorXd slack;
  Eigen::VectorXd duals;          // y <= 0 for the rows A x <= b
  Eigen::VectorXd reduced_costs;  // c - A'y for the structural variables
  std::vector<int> basis;         // variable index per row (slacks >= nx)
  int iterations = 0;
};

inline LpSolution solve_lp(const LinearProgram& lp,
                           const SimplexOptions& opt = {}) {
  const Eigen::Index nx = lp.num_vars();
  const Eigen::Index nr = lp.num_rows();
  if (lp.A.rows() != nr || lp.A.cols() != nx) {
    throw Error(ErrorCode::kInvalidArgument, "LP dimensions do not match");
  }
  for (Eigen::Index i = 0; i < nr; ++i) {
    if (lp.b(i) < 0.0) {
      throw Error(ErrorCode::kInfeasibleInput,
                  "right-hand side must be nonnegative");
    }
  }

  auto column = [&](Eigen::Index j) -> Eigen::VectorXd {
    if (j < nx) return lp.A.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(nr);
    e(j - nx) = 1.0;
    return e;
  };
  auto cost = [&](Eigen::Index j) { return j < nx ? lp.c(j) : 0.0; };

  std::vector<int> basis(nr);
  std::vector<char> in_basis(nx + nr, 0);
  for (Eigen::Index i = 0; i < nr; ++i) {
    basis[i] = static_cast<int>(nx + i);
    in_basis[nx + i] = 1;
  }
  Eigen::MatrixXd basis_inverse = Eigen::MatrixXd::Identity(nr, nr);
  Eigen::VectorXd x_basic = lp.b;

  auto refactor = [&] {
    Eigen::MatrixXd basis_matrix(nr, nr);
    for (Eigen::Index i = 0; i < nr; ++i) basis_matrix.col(i) = column(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    basis_inverse = lu.inverse();
    x_basic = basis_inverse * lp.b;
    for (Eigen::Index i = 0; i < nr; ++i) {
      if (x_basic(i) < 0.0 && x_basic(i) > -opt.feasibility_tolerance) {
        x_basic(i) = 0.0;
      }
    }
  };

  LpSolution sol;
  Eigen::VectorXd c_basic(nr), y(nr), w(nr), reduced(nx);
  int since_refactor = 0;
  while (true) {
    for (Eigen::Index i = 0; i < nr; ++i) c_basic(i) = cost(basis[i]);
    y.noalias() = basis_inverse.transpose() * c_basic;
    reduced.noalias() = lp.c - lp.A.transpose() * y;

    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < nx + nr && entering < 0; ++j) {
      if (in_basis[j]) continue;
      const double d = j < nx ? reduced(j) : -y(j - nx);
      if (d < -opt.optimality_tolerance) entering = j;
    }
    if (entering < 0) break;
    if (sol.iterations >= opt.max_iterations) {
      sol.status = LpStatus::kMaxIterations;
      break;
    }

    w.noalias() = basis_inverse * column(entering);
    Eigen::Index leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < nr; ++i) {
      if (w(i) <= opt.pivot_tolerance) continue;
      const double ratio = std::max(x_basic(i), 0.0) / w(i);
      if (leaving < 0) {
        best_ratio = ratio;
        leaving = i;
        continue;
      }
      const double tie = 1e-12 * (1.0 + best_ratio);
      if (ratio < best_ratio - tie ||
          (ratio <= best_ratio + tie && basis[i] < basis[leaving])) {
        best_ratio = std::min(ratio, best_ratio);
        leaving = i;
      }
    }
    if (leaving < 0) {
      sol.status = LpStatus::kUnbounded;
      break;
    }

    // Pivot: update basic values and the explicit inverse (eta update).
    const double theta = std::max(x_basic(leaving), 0.0) / w(leaving);
    x_basic -= theta * w;
    x_basic(leaving) = theta;
    const Eigen::RowVectorXd pivot_row = basis_inverse.row(leaving) / w(leaving);
    basis_inverse.noalias() -= w * pivot_row;
    basis_inverse.row(leaving) = pivot_row;
    for (Eigen::Index i = 0; i < nr; ++i) {
      if (x_basic(i) < 0.0 && x_basic(i) > -opt.feasibility_tolerance) {
        x_basic(i) = 0.0;
      }
    }
    in_basis[basis[leaving]] = 0;
    basis[leaving] = static_cast<int>(entering);
    in_basis[entering] = 1;
    ++sol.iterations;
    if (++since_refactor >= opt.refactor_interval) {
      refactor();
      since_refactor = 0;
    }
  }

  if (sol.status == LpStatus::kUnbounded) {
    throw Error(ErrorCode::kUnbounded, "LP objective is unbounded below");
  }
  if (sol.status == LpStatus::kMaxIterations) {
    throw Error(ErrorCode::kMaxIterations,
                "simplex hit " + std::to_string(opt.max_iterations) +
                    " iterations");
  }
  if (since_refactor > 0) {
    refactor();
    for (Eigen::Index i = 0; i < nr; ++i) c_basic(i) = cost(basis[i]);
    y.noalias() = basis_inverse.transpose() * c_basic;
    reduced.noalias() = lp.c - lp.A.transpose() * y;
  }

  sol.x = Eigen::VectorXd::Zero(nx);
  for (Eigen::Index i = 0; i < nr; ++i) {
    if (basis[i] < nx) sol.x(basis[i]) = x_basic(i);
  }
  // Basic values within tolerance of a bound are snapped to it.
  for (Eigen::Index j = 0; j < nx; ++j) {
    if (std::abs(sol.x(j)) < 1e-12) sol.x(j) = 0.0;
  }
  sol.slack = lp.b - lp.A * sol.x;
  sol.duals = y;
  sol.reduced_costs = reduced;
  sol.basis = basis;
  sol.objective = lp.c.dot(sol.x) + lp.objective_offset;
  return sol;
}

/// Max over |x_j d_j| and |y_i slack_i| at the returned basis.
inline double complementary_slackness_residual(const LinearProgram& lp,
                                               const LpSolution& sol) {
  double res = 0.0;
  for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
    res = std::max(res, std::abs(sol.x(j) * sol.reduced_costs(j)));
  }
  for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
    res = std::max(res, std::abs(sol.duals(i) * sol.slack(i)));
  }
  return res;
}

/// Plain-text dump of the standard-form LP.
///
///   lp <num_vars> <num_rows>
///   offset <value>
///   c <j> <value>        (nonzeros only, 0-based)
///   a <i> <j> <value>    (nonzeros only)
///   b <i> <value>        (every row)
///
/// meaning: minimize offset + c'x subject to A x <= b, x >= 0.
inline void write_lp(std::ostream& out, const LinearProgram& lp) {
  out.precision(17);
  out << "lp " << lp.num_vars() << ' ' << lp.num_rows() << '\n';
  out << "offset " << lp.objective_offset << '\n';
  for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
    if (lp.c(j) != 0.0) out << "c " << j << ' ' << lp.c(j) << '\n';
  }
  for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
    for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
      if (lp.A(i, j) != 0.0) out << "a " << i << ' ' << j << ' ' << lp.A(i, j) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
    out << "b " << i << ' ' << lp.b(i) << '\n';
  }
}

}  // namespace posroute
