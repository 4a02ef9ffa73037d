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

// Shared instances and seeded generators for the test suites.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "posroute/graph_model.hpp"

namespace posroute::testing {

/// Five vertices, nine edges, caps of 1/4 on the edges leaving 1 and 2.
inline ProblemInstance example1(bool with_bounds = true) {
  const std::vector<EdgeInput> edges = {
      {1, 2}, {1, 4}, {1, 5}, {2, 3}, {2, 4},
      {2, 5}, {3, std::nullopt}, {4, 3}, {5, 3}};
  Eigen::VectorXd s(5), r(9), u(9);
  s << 10, 5, 1, 3, 2;
  r << 1, 5, 5, 1, 1, 1, 1, 1, 1;
  u << 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 1, 1, 1;
  std::optional<Eigen::VectorXd> x_max, u_max;
  if (with_bounds) {
    x_max = Eigen::VectorXd::Ones(5);
    u_max = u;
  }
  return make_instance(build_graph(5, edges), s, r, x_max, u_max);
}

/// Single vertex with one edge to the goal.
inline ProblemInstance single_vertex(double s = 1.0, double r = 1.0,
                                     double x_max = 1.0, double u_max = 1.0) {
  const std::vector<EdgeInput> edges = {{1, std::nullopt}};
  return make_instance(build_graph(1, edges), Eigen::VectorXd::Constant(1, s),
                       Eigen::VectorXd::Constant(1, r),
                       Eigen::VectorXd::Constant(1, x_max),
                       Eigen::VectorXd::Constant(1, u_max));
}

/// Same graph and costs with every bound replaced by `value`.
inline ProblemInstance with_uniform_bounds(const ProblemInstance& inst, double value) {
  ProblemInstance out = inst;
  out.bounds = CapacityBounds{Eigen::VectorXd::Constant(inst.n(), value),
                              Eigen::VectorXd::Constant(inst.m(), value)};
  return out;
}

struct RandomInstanceOptions {
  int min_vertices = 1;
  int max_vertices = 8;
  double extra_edge_probability = 0.3;
  double goal_edge_probability = 0.2;
  bool bounded = true;
};

/// Random instance whose goal is reachable from every vertex: vertex i always
/// gets an edge to a random vertex of higher index (or the goal), plus random
/// extra edges in either direction.
inline ProblemInstance random_instance(std::mt19937_64& rng,
                                       const RandomInstanceOptions& opt = {}) {
  std::uniform_int_distribution<int> size(opt.min_vertices, opt.max_vertices);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = size(rng);
  std::vector<std::vector<char>> present(n, std::vector<char>(n + 1, 0));
  std::vector<EdgeInput> edges;
  auto add = [&](int i, int j) {
    if (i == j || present[i][j]) return;
    present[i][j] = 1;
    edges.push_back({i + 1, j == n ? std::nullopt : std::optional<int>(j + 1)});
  };
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> forward(i + 1, n);
    add(i, forward(rng));
    if (unit(rng) < opt.goal_edge_probability) add(i, n);
    for (int j = 0; j < n; ++j) {
      if (unit(rng) < opt.extra_edge_probability) add(i, j);
    }
  }
  const int m = static_cast<int>(edges.size());
  Eigen::VectorXd s(n), r(m), x_max(n), u_max(m);
  for (int i = 0; i < n; ++i) s(i) = 0.5 + 9.5 * unit(rng);
  for (int k = 0; k < m; ++k) r(k) = unit(rng) < 0.2 ? 0.0 : 5.0 * unit(rng);
  for (int i = 0; i < n; ++i) x_max(i) = 0.5 + 1.5 * unit(rng);
  for (int k = 0; k < m; ++k) u_max(k) = 0.1 + 1.0 * unit(rng);
  std::optional<Eigen::VectorXd> xb, ub;
  if (opt.bounded) {
    xb = x_max;
    ub = u_max;
  }
  return make_instance(build_graph(n, edges), s, r, xb, ub);
}

/// Uniform point of the box [0, x_max] (or [0, scale]^n without bounds).
inline Eigen::VectorXd random_state(std::mt19937_64& rng, const ProblemInstance& inst,
                                    double scale = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    const double hi = inst.bounds ? inst.bounds->x_max(i) : scale;
    x(i) = hi * unit(rng);
  }
  return x;
}

/// Cost-to-go of the cheapest path to the goal where leaving vertex i over
/// edge k costs s_i + r_k. Dijkstra from the goal over reversed edges.
inline Eigen::VectorXd shortest_path_oracle(const ProblemInstance& inst) {
  const RoutingGraph& g = inst.graph;
  const int n = g.num_vertices();
  std::vector<std::vector<std::pair<int, double>>> reverse(n + 1);
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edge(k);
    reverse[e.head].push_back({e.tail, inst.costs.s(e.tail) + inst.costs.r(k)});
  }
  std::vector<double> dist(n + 1, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[n] = 0.0;
  heap.push({0.0, n});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& [u, w] : reverse[v]) {
      if (d + w < dist[u]) {
        dist[u] = d + w;
        heap.push({dist[u], u});
      }
    }
  }
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = dist[i];
  return out;
}

}  // namespace posroute::testing
