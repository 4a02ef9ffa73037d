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

// Static problem data for routing a commodity over a directed graph towards
// an absorbing goal vertex: x(t+1) = x(t) + B u(t).
//
// Vertices are indexed 0..n-1 internally and the goal is index n. User-facing
// labels are 1-based, with the goal printed as "goal".

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "posroute/error.hpp"

namespace posroute {

/// An edge as given by the user: 1-based labels, `to == std::nullopt` is the
/// goal.
struct EdgeInput {
  int from = 0;
  std::optional<int> to;
};

/// Canonical edge, 0-based; `head == n` denotes the goal.
struct Edge {
  int tail = 0;
  int head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline std::string vertex_label(int vertex, int num_vertices) {
  return vertex == num_vertices ? std::string("goal")
                                : std::to_string(vertex + 1);
}

class RoutingGraph {
 public:
  /// Validates the edge list and sorts it into canonical order: grouped by
  /// tail ascending, then by head ascending with the goal last.
  RoutingGraph(int num_vertices, std::span<const EdgeInput> input_edges)
      : n_(num_vertices) {
    if (n_ <= 0) {
      throw Error(ErrorCode::kEmptyGraph, "graph needs at least one vertex");
    }
    std::vector<Edge> raw;
    raw.reserve(input_edges.size());
    for (std::size_t k = 0; k < input_edges.size(); ++k) {
      const EdgeInput& e = input_edges[k];
      if (e.from < 1 || e.from > n_) {
        throw Error(ErrorCode::kVertexOutOfRange,
                    "edge " + std::to_string(k) + " has tail " +
                        std::to_string(e.from) + " outside 1.." +
                        std::to_string(n_));
      }
      int head = n_;
      if (e.to.has_value()) {
        if (*e.to < 1 || *e.to > n_ + 1) {
          throw Error(ErrorCode::kVertexOutOfRange,
                      "edge " + std::to_string(k) + " has head " +
                          std::to_string(*e.to) + " outside 1.." +
                          std::to_string(n_) + " or goal");
        }
        head = *e.to - 1;
      }
      if (head == e.from - 1) {
        throw Error(ErrorCode::kSelfLoop,
                    "self-loop at vertex " + std::to_string(e.from));
      }
      raw.push_back({e.from - 1, head});
    }

    std::vector<int> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::pair(raw[a].tail, raw[a].head) <
             std::pair(raw[b].tail, raw[b].head);
    });

    edges_.reserve(raw.size());
    input_of_canonical_ = order;
    canonical_of_input_.assign(raw.size(), 0);
    for (std::size_t c = 0; c < order.size(); ++c) {
      const Edge& e = raw[order[c]];
      if (!edges_.empty() && edges_.back() == e) {
        throw Error(ErrorCode::kDuplicateEdge,
                    "duplicate edge " + vertex_label(e.tail, n_) + "->" +
                        vertex_label(e.head, n_));
      }
      edges_.push_back(e);
      canonical_of_input_[order[c]] = static_cast<int>(c);
    }

    block_begin_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) ++block_begin_[e.tail + 1];
    std::partial_sum(block_begin_.begin(), block_begin_.end(),
                     block_begin_.begin());
  }

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int goal() const { return n_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int k) const { return edges_[k]; }

  /// Outgoing edges of vertex i occupy [block_begin(i), block_end(i)).
  int block_begin(int i) const { return block_begin_[i]; }
  int block_end(int i) const { return block_begin_[i + 1]; }
  int block_size(int i) const { return block_end(i) - block_begin(i); }

  /// canonical_of_input()[k] is the canonical index of the k-th input edge.
  const std::vector<int>& canonical_of_input() const {
    return canonical_of_input_;
  }
  const std::vector<int>& input_of_canonical() const {
    return input_of_canonical_;
  }
  bool has_identity_permutation() const {
    for (std::size_t k = 0; k < canonical_of_input_.size(); ++k) {
      if (canonical_of_input_[k] != static_cast<int>(k)) return false;
    }
    return true;
  }

  /// Vertices without outgoing edges. Legal, but synthesis will reject them.
  std::vector<int> dangling_vertices() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i) {
      if (block_size(i) == 0) out.push_back(i);
    }
    return out;
  }

  /// Reorders a per-edge vector given in input order into canonical order.
  Eigen::VectorXd to_canonical(const Eigen::VectorXd& input_order) const {
    Eigen::VectorXd out(input_order.size());
    for (std::size_t k = 0; k < canonical_of_input_.size(); ++k) {
      out(canonical_of_input_[k]) = input_order(static_cast<Eigen::Index>(k));
    }
    return out;
  }

  std::string edge_label(int k) const {
    return vertex_label(edges_[k].tail, n_) + "->" +
           vertex_label(edges_[k].head, n_);
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<int> block_begin_;
  std::vector<int> canonical_of_input_;
  std::vector<int> input_of_canonical_;
};

inline RoutingGraph build_graph(int num_vertices,
                                std::span<const EdgeInput> edges) {
  return RoutingGraph(num_vertices, edges);
}

struct IncidenceMatrix {
  Eigen::MatrixXd B;
  std::vector<int> block_widths;

  /// B with its -1 entries removed (only successor entries kept).
  Eigen::MatrixXd positive_part() const { return B.cwiseMax(0.0); }
};

inline IncidenceMatrix incidence_matrix(const RoutingGraph& g) {
  IncidenceMatrix out;
  out.B = Eigen::MatrixXd::Zero(g.num_vertices(), g.num_edges());
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edge(k);
    out.B(e.tail, k) = -1.0;
    if (e.head != g.goal()) out.B(e.head, k) = 1.0;
  }
  out.block_widths.resize(g.num_vertices());
  for (int i = 0; i < g.num_vertices(); ++i) {
    out.block_widths[i] = g.block_size(i);
  }
  return out;
}

/// Vertices from which the goal is reachable, in ascending order.
inline std::vector<int> goal_reachable(const RoutingGraph& g) {
  const int n = g.num_vertices();
  std::vector<std::vector<int>> predecessors(n + 1);
  for (const Edge& e : g.edges()) predecessors[e.head].push_back(e.tail);

  std::vector<char> seen(n + 1, 0);
  std::vector<int> stack{g.goal()};
  seen[g.goal()] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : predecessors[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) out.push_back(i);
  }
  return out;
}

/// Stage cost weights: l(x, u) = s'x + r'u. `r` is in canonical edge order.
struct CostWeights {
  Eigen::VectorXd s;
  Eigen::VectorXd r;
};

/// Box constraints 0 <= x <= x_max, 0 <= u <= u_max (canonical edge order).
struct CapacityBounds {
  Eigen::VectorXd x_max;
  Eigen::VectorXd u_max;
};

struct ProblemInstance {
  RoutingGraph graph;
  CostWeights costs;
  std::optional<CapacityBounds> bounds;

  int n() const { return graph.num_vertices(); }
  int m() const { return graph.num_edges(); }
  bool bounded() const { return bounds.has_value(); }
};

/// Checks dimensions and signs. Costs and bounds must already be in canonical
/// edge order.
inline void validate(const ProblemInstance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  if (inst.costs.s.size() != n) {
    throw Error(ErrorCode::kInvalidModel,
                "s has " + std::to_string(inst.costs.s.size()) +
                    " entries, expected " + std::to_string(n));
  }
  if (inst.costs.r.size() != m) {
    throw Error(ErrorCode::kInvalidModel,
                "r has " + std::to_string(inst.costs.r.size()) +
                    " entries, expected " + std::to_string(m));
  }
  for (int i = 0; i < n; ++i) {
    if (!(inst.costs.s(i) > 0.0)) {
      throw Error(ErrorCode::kNonpositiveS,
                  "s at vertex " + std::to_string(i + 1) + " is not positive");
    }
  }
  for (int k = 0; k < m; ++k) {
    if (!(inst.costs.r(k) >= 0.0)) {
      throw Error(ErrorCode::kNegativeR,
                  "r on edge " + inst.graph.edge_label(k) + " is negative");
    }
  }
  if (!inst.bounds) return;
  const CapacityBounds& b = *inst.bounds;
  if (b.x_max.size() != n || b.u_max.size() != m) {
    throw Error(ErrorCode::kInvalidBounds, "bound dimensions do not match");
  }
  for (int i = 0; i < n; ++i) {
    if (!(b.x_max(i) > 0.0) || !std::isfinite(b.x_max(i))) {
      throw Error(ErrorCode::kInvalidBounds,
                  "x_max at vertex " + std::to_string(i + 1) +
                      " must be positive and finite");
    }
  }
  for (int k = 0; k < m; ++k) {
    if (!(b.u_max(k) > 0.0) || !std::isfinite(b.u_max(k))) {
      throw Error(ErrorCode::kInvalidBounds,
                  "u_max on edge " + inst.graph.edge_label(k) +
                      " must be positive and finite");
    }
  }
}

/// Builds an instance from per-edge data given in the graph's input order.
inline ProblemInstance make_instance(RoutingGraph graph, Eigen::VectorXd s,
                                     const Eigen::VectorXd& r_input,
                                     std::optional<Eigen::VectorXd> x_max,
                                     std::optional<Eigen::VectorXd> u_input) {
  if (r_input.size() != graph.num_edges()) {
    throw Error(ErrorCode::kInvalidModel, "r size does not match edge count");
  }
  if (x_max.has_value() != u_input.has_value()) {
    throw Error(ErrorCode::kInvalidBounds,
                "state and edge bounds must be given together");
  }
  Eigen::VectorXd r = graph.to_canonical(r_input);
  std::optional<CapacityBounds> bounds;
  if (x_max) {
    if (u_input->size() != graph.num_edges()) {
      throw Error(ErrorCode::kInvalidBounds,
                  "u_max size does not match edge count");
    }
    bounds = CapacityBounds{std::move(*x_max), graph.to_canonical(*u_input)};
  }
  ProblemInstance inst{std::move(graph), CostWeights{std::move(s), std::move(r)},
                       std::move(bounds)};
  validate(inst);
  return inst;
}

}  // namespace posroute
