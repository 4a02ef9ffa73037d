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

// Optimal routing without capacity bounds.
//
// With positivity constraints only, the infinite-horizon value is V(x) = p'x
// where p > 0 solves
//
//   s_i + min( min_k (r_i + B_i' p)_k , 0 ) = 0   for every vertex i,
//
// and the optimal feedback u = K x sends everything stored at i along the
// first edge attaining the inner minimum.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "posroute/error.hpp"
#include "posroute/graph_model.hpp"

namespace posroute {

struct ValueVector {
  Eigen::VectorXd p;
  Eigen::VectorXd residual;
};

/// Residual of the value equation at p, per vertex.
inline Eigen::VectorXd value_equation_residual(const RoutingGraph& g,
                                               const CostWeights& costs,
                                               const Eigen::VectorXd& p) {
  const int n = g.num_vertices();
  Eigen::VectorXd res(n);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = g.block_begin(i); k < g.block_end(i); ++k) {
      const int j = g.edge(k).head;
      const double head_value = j == g.goal() ? 0.0 : p(j);
      best = std::min(best, costs.r(k) + head_value - p(i));
    }
    res(i) = costs.s(i) + std::min(best, 0.0);
  }
  return res;
}

/// Bellman-Ford on the vertex-and-edge weighted graph: p_i is the minimal
/// sum of s over visited vertices plus r over traversed edges to the goal.
inline ValueVector solve_value_vector(const RoutingGraph& g,
                                      const CostWeights& costs) {
  const int n = g.num_vertices();
  for (int i = 0; i < n; ++i) {
    if (!(costs.s(i) > 0.0)) {
      throw Error(ErrorCode::kNonpositiveS,
                  "s at vertex " + std::to_string(i + 1) + " is not positive");
    }
  }
  const auto reachable = goal_reachable(g);
  if (static_cast<int>(reachable.size()) != n) {
    std::vector<char> ok(n, 0);
    for (int v : reachable) ok[v] = 1;
    std::string names;
    for (int i = 0; i < n; ++i) {
      if (!ok[i]) names += (names.empty() ? "" : ", ") + std::to_string(i + 1);
    }
    throw Error(ErrorCode::kUnreachableGoal,
                "goal is not reachable from vertex " + names);
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, kInf);
  // Simple optimal paths have at most n edges, so n sweeps suffice; the last
  // sweep only confirms the fixed point.
  for (int sweep = 0; sweep <= n; ++sweep) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      double best = kInf;
      for (int k = g.block_begin(i); k < g.block_end(i); ++k) {
        const int j = g.edge(k).head;
        best = std::min(best, costs.r(k) + (j == g.goal() ? 0.0 : p(j)));
      }
      const double candidate = costs.s(i) + best;
      if (candidate < p(i)) {
        p(i) = candidate;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return {p, value_equation_residual(g, costs, p)};
}

/// Selector gain K (m x n, 0/1): vertex i sends all of x_i over edge
/// selected_edge[i] to successor nu[i] (nu[i] == n is the goal).
struct FeedbackGain {
  Eigen::MatrixXd K;
  std::vector<int> nu;
  std::vector<int> selected_edge;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return K * x; }
};

/// Assembles K from an explicit choice of one outgoing edge per vertex.
/// Does not check for routing cycles; see split_positive_part.
inline FeedbackGain gain_from_selection(const RoutingGraph& g,
                                        const std::vector<int>& selected_edge) {
  const int n = g.num_vertices();
  if (static_cast<int>(selected_edge.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "need one selected edge per vertex");
  }
  FeedbackGain out;
  out.K = Eigen::MatrixXd::Zero(g.num_edges(), n);
  out.nu.resize(n);
  out.selected_edge = selected_edge;
  for (int i = 0; i < n; ++i) {
    const int k = selected_edge[i];
    if (k < g.block_begin(i) || k >= g.block_end(i)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge " + std::to_string(k) + " does not leave vertex " +
                      std::to_string(i + 1));
    }
    out.K(k, i) = 1.0;
    out.nu[i] = g.edge(k).head;
  }
  return out;
}

/// Relative tolerance under which two candidate edge values count as tied.
inline constexpr double kTieTolerance = 1e-12;

inline FeedbackGain build_feedback_gain(const RoutingGraph& g,
                                        const CostWeights& costs,
                                        const Eigen::VectorXd& p) {
  const int n = g.num_vertices();
  std::vector<int> selected(n, -1);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = g.block_begin(i); k < g.block_end(i); ++k) {
      const int j = g.edge(k).head;
      const double value = costs.r(k) + (j == g.goal() ? 0.0 : p(j)) - p(i);
      // First index wins ties.
      if (selected[i] < 0 ||
          value < best - kTieTolerance * (1.0 + std::abs(best))) {
        best = value;
        selected[i] = k;
      }
    }
    if (selected[i] < 0) {
      throw Error(ErrorCode::kUnreachableGoal,
                  "vertex " + std::to_string(i + 1) + " has no outgoing edge");
    }
  }
  return gain_from_selection(g, selected);
}

struct PositivePartSplit {
  Eigen::MatrixXd B_tilde;   // B with only its +1 entries
  Eigen::MatrixXd routing;   // B_tilde K, nilpotent
};

/// Splits BK = B_tilde K - I and verifies that B_tilde K is nilpotent.
inline PositivePartSplit split_positive_part(const Eigen::MatrixXd& B,
                                             const FeedbackGain& gain) {
  const Eigen::Index n = B.rows();
  PositivePartSplit out;
  out.B_tilde = B.cwiseMax(0.0);
  out.routing = out.B_tilde * gain.K;
  const Eigen::MatrixXd BK = B * gain.K;
  if (BK != out.routing - Eigen::MatrixXd::Identity(n, n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "gain does not select exactly one outgoing edge per vertex");
  }
  // Entries are path counts (0/1 for a selector gain), so the products are
  // exact in floating point.
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j) power = power * out.routing;
  if (!power.isZero(0.0)) {
    throw Error(ErrorCode::kCycleDetected,
                "selected edges contain a routing cycle");
  }
  return out;
}

/// Vertices in an order where every vertex appears after its successor,
/// i.e. goal-side first. Throws CycleDetected if nu is cyclic.
inline std::vector<int> goal_first_order(const std::vector<int>& nu) {
  const int n = static_cast<int>(nu.size());
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> order;
  order.reserve(n);
  for (int start = 0; start < n; ++start) {
    std::vector<int> chain;
    int v = start;
    while (v < n && state[v] == 0) {
      state[v] = 1;
      chain.push_back(v);
      v = nu[v];
    }
    if (v < n && state[v] == 1) {
      throw Error(ErrorCode::kCycleDetected,
                  "successor map cycles through vertex " + std::to_string(v + 1));
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      state[*it] = 2;
      order.push_back(*it);
    }
  }
  return order;
}

}  // namespace posroute
