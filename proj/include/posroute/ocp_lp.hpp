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

// The finite-horizon optimal control problem as a linear program over the
// controls only; states are eliminated via x(t) = x0 + B sum_{tau<t} u(tau).
//
// Variable u(t)_k has column t * m + k. Row blocks, each ordered by (t, i):
//   mass     1'u_i(t) - sum_{tau<t} (B u(tau))_i <= x0_i       t = 0..N-1
//   upper    sum_{tau<t} (B u(tau))_i <= x_max_i - x0_i         t = 1..N
//   lower   -sum_{tau<t} (B u(tau))_i <= x0_i                   t = 1..N
//   caps     u(t)_k <= u_max_k                                  t = 0..N-1
// Nonnegativity u >= 0 is implicit in the simplex. Without bounds the upper
// and cap blocks are omitted.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "posroute/error.hpp"
#include "posroute/graph_model.hpp"
#include "posroute/simplex.hpp"

namespace posroute {

struct FiniteOcp {
  int horizon = 0;
  Eigen::VectorXd x0;
  LinearProgram lp;
  int n = 0;
  int m = 0;

  /// All constraint rows including u >= 0 (handled as variable bounds).
  Eigen::Index num_constraint_rows() const {
    return lp.num_rows() + static_cast<Eigen::Index>(m) * horizon;
  }
};

inline constexpr double kStateTolerance = 1e-12;

inline void check_state(const ProblemInstance& inst, const Eigen::VectorXd& x) {
  if (x.size() != inst.n()) {
    throw Error(ErrorCode::kX0OutOfBounds,
                "state has " + std::to_string(x.size()) + " entries, expected " +
                    std::to_string(inst.n()));
  }
  for (int i = 0; i < inst.n(); ++i) {
    const bool above = inst.bounds && x(i) > inst.bounds->x_max(i) + kStateTolerance;
    if (!(x(i) >= -kStateTolerance) || above) {
      throw Error(ErrorCode::kX0OutOfBounds,
                  "x_" + std::to_string(i + 1) + " = " + std::to_string(x(i)) +
                      " is outside the admissible box");
    }
  }
}

inline FiniteOcp build_ocp(const ProblemInstance& inst, const Eigen::VectorXd& x0,
                           int horizon) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  check_state(inst, x0);
  const int n = inst.n();
  const int m = inst.m();
  const int N = horizon;
  const Eigen::MatrixXd B = incidence_matrix(inst.graph).B;
  const Eigen::VectorXd x_start = x0.cwiseMax(0.0);

  FiniteOcp ocp;
  ocp.horizon = N;
  ocp.x0 = x_start;
  ocp.n = n;
  ocp.m = m;

  const Eigen::VectorXd Bts = B.transpose() * inst.costs.s;
  LinearProgram& lp = ocp.lp;
  lp.c.resize(static_cast<Eigen::Index>(m) * N);
  for (int t = 0; t < N; ++t) {
    lp.c.segment(static_cast<Eigen::Index>(t) * m, m) =
        inst.costs.r + static_cast<double>(N - 1 - t) * Bts;
  }
  lp.objective_offset = static_cast<double>(N) * inst.costs.s.dot(x_start);

  const bool bounded = inst.bounds.has_value();
  const int rows = n * N + (bounded ? 2 : 1) * n * N + (bounded ? m * N : 0);
  lp.A = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(m) * N);
  lp.b = Eigen::VectorXd::Zero(rows);

  int row = 0;
  for (int t = 0; t < N; ++t) {
    for (int i = 0; i < n; ++i, ++row) {
      for (int k = inst.graph.block_begin(i); k < inst.graph.block_end(i); ++k) {
        lp.A(row, t * m + k) += 1.0;
      }
      for (int tau = 0; tau < t; ++tau) {
        lp.A.block(row, tau * m, 1, m) -= B.row(i);
      }
      lp.b(row) = x_start(i);
    }
  }
  if (bounded) {
    for (int t = 1; t <= N; ++t) {
      for (int i = 0; i < n; ++i, ++row) {
        for (int tau = 0; tau < t; ++tau) lp.A.block(row, tau * m, 1, m) = B.row(i);
        lp.b(row) = std::max(inst.bounds->x_max(i) - x_start(i), 0.0);
      }
    }
  }
  for (int t = 1; t <= N; ++t) {
    for (int i = 0; i < n; ++i, ++row) {
      for (int tau = 0; tau < t; ++tau) lp.A.block(row, tau * m, 1, m) = -B.row(i);
      lp.b(row) = x_start(i);
    }
  }
  if (bounded) {
    for (int t = 0; t < N; ++t) {
      for (int k = 0; k < m; ++k, ++row) {
        lp.A(row, t * m + k) = 1.0;
        lp.b(row) = inst.bounds->u_max(k);
      }
    }
  }
  return ocp;
}

struct OcpSolution {
  double value = 0.0;                 // V_N(x0)
  std::vector<Eigen::VectorXd> controls;  // u*(0..N-1)
  LpSolution lp;
};

inline OcpSolution solve_ocp(const FiniteOcp& ocp, const SimplexOptions& opt = {}) {
  OcpSolution out;
  out.lp = solve_lp(ocp.lp, opt);
  out.value = out.lp.objective;
  for (int t = 0; t < ocp.horizon; ++t) {
    out.controls.push_back(out.lp.x.segment(static_cast<Eigen::Index>(t) * ocp.m, ocp.m));
  }
  return out;
}

inline OcpSolution value_function(const ProblemInstance& inst,
                                  const Eigen::VectorXd& x0, int horizon,
                                  const SimplexOptions& opt = {}) {
  return solve_ocp(build_ocp(inst, x0, horizon), opt);
}

/// J_N(x0, u) by forward simulation.
inline double finite_horizon_cost(const ProblemInstance& inst,
                                  const Eigen::VectorXd& x0,
                                  const std::vector<Eigen::VectorXd>& controls) {
  const Eigen::MatrixXd B = incidence_matrix(inst.graph).B;
  Eigen::VectorXd x = x0;
  double cost = 0.0;
  for (const Eigen::VectorXd& u : controls) {
    cost += inst.costs.s.dot(x) + inst.costs.r.dot(u);
    x += B * u;
  }
  return cost;
}

}  // namespace posroute
