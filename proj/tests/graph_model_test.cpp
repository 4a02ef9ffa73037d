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


#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "fixtures.hpp"
#include "posroute/graph_model.hpp"
#include "posroute/model_io.hpp"

namespace posroute {
namespace {

using testing::example1;

TEST(RoutingGraph, Example1Partition) {
  const ProblemInstance inst = example1();
  const RoutingGraph& g = inst.graph;
  EXPECT_EQ(g.num_vertices(), 5);
  EXPECT_EQ(g.num_edges(), 9);
  const std::vector<int> widths = {3, 3, 1, 1, 1};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(g.block_size(i), widths[i]) << i;
  EXPECT_TRUE(g.has_identity_permutation());
}

TEST(RoutingGraph, SingleGoalEdge) {
  const std::vector<EdgeInput> edges = {{1, std::nullopt}};
  const RoutingGraph g(1, edges);
  EXPECT_EQ(g.num_edges(), 1);
  EXPECT_EQ(g.block_size(0), 1);
  EXPECT_EQ(g.edge(0).head, g.goal());
}

TEST(RoutingGraph, GoalLabelAliasIsNPlusOne) {
  const std::vector<EdgeInput> a = {{1, 2}, {2, 3}};
  const std::vector<EdgeInput> b = {{1, 2}, {2, std::nullopt}};
  EXPECT_EQ(RoutingGraph(2, a).edges(), RoutingGraph(2, b).edges());
}

TEST(RoutingGraph, ShuffledInputIsCanonicalised) {
  const std::vector<EdgeInput> shuffled = {
      {1, 5}, {1, 2}, {1, 4}, {3, std::nullopt}, {2, 5},
      {5, 3}, {2, 3}, {4, 3}, {2, 4}};
  const RoutingGraph g(5, shuffled);
  EXPECT_EQ(g.edges(), example1().graph.edges());
  EXPECT_FALSE(g.has_identity_permutation());
  // Input edge 0 (1->5) is canonical edge 2.
  EXPECT_EQ(g.canonical_of_input()[0], 2);
  for (int k = 0; k < 9; ++k) {
    EXPECT_EQ(g.canonical_of_input()[g.input_of_canonical()[k]], k);
  }
  Eigen::VectorXd r(9);
  r << 50, 10, 40, 70, 60, 90, 20, 80, 30;
  Eigen::VectorXd expected(9);
  expected << 10, 40, 50, 20, 30, 60, 70, 80, 90;
  EXPECT_EQ(g.to_canonical(r), expected);
}

TEST(RoutingGraph, GoalSortsLastWithinBlock) {
  const std::vector<EdgeInput> edges = {{1, std::nullopt}, {1, 2}, {2, std::nullopt}};
  const RoutingGraph g(2, edges);
  EXPECT_EQ(g.edge(0).head, 1);
  EXPECT_EQ(g.edge(1).head, g.goal());
}

TEST(RoutingGraph, CanonicalisationIsIdempotent) {
  const std::vector<EdgeInput> shuffled = {{2, 1}, {1, std::nullopt}, {1, 2}};
  const RoutingGraph g(2, shuffled);
  std::vector<EdgeInput> again;
  for (const Edge& e : g.edges()) {
    again.push_back({e.tail + 1, e.head == g.goal() ? std::nullopt
                                                   : std::optional<int>(e.head + 1)});
  }
  const RoutingGraph h(2, again);
  EXPECT_TRUE(h.has_identity_permutation());
  EXPECT_EQ(h.edges(), g.edges());
}

TEST(RoutingGraph, RejectsMalformedInput) {
  const std::vector<EdgeInput> dup = {{1, 2}, {1, 2}, {2, std::nullopt}};
  EXPECT_POSROUTE_ERROR(RoutingGraph(2, dup), ErrorCode::kDuplicateEdge);
  const std::vector<EdgeInput> tail = {{0, std::nullopt}};
  EXPECT_POSROUTE_ERROR(RoutingGraph(1, tail), ErrorCode::kVertexOutOfRange);
  const std::vector<EdgeInput> head = {{1, 4}};
  EXPECT_POSROUTE_ERROR(RoutingGraph(2, head), ErrorCode::kVertexOutOfRange);
  const std::vector<EdgeInput> loop = {{1, 1}};
  EXPECT_POSROUTE_ERROR(RoutingGraph(1, loop), ErrorCode::kSelfLoop);
  EXPECT_POSROUTE_ERROR(RoutingGraph(0, {}), ErrorCode::kEmptyGraph);
}

TEST(RoutingGraph, DanglingVertexIsLegalButFlagged) {
  const std::vector<EdgeInput> edges = {{1, std::nullopt}};
  const RoutingGraph g(2, edges);
  EXPECT_EQ(g.dangling_vertices(), std::vector<int>{1});
}

TEST(IncidenceMatrix, Example1) {
  Eigen::MatrixXd expected(5, 9);
  expected << -1, -1, -1, 0, 0, 0, 0, 0, 0,
               1, 0, 0, -1, -1, -1, 0, 0, 0,
               0, 0, 0, 1, 0, 0, -1, 1, 1,
               0, 1, 0, 0, 1, 0, 0, -1, 0,
               0, 0, 1, 0, 0, 1, 0, 0, -1;
  const IncidenceMatrix inc = incidence_matrix(example1().graph);
  EXPECT_EQ(inc.B, expected);
  EXPECT_EQ(inc.block_widths, (std::vector<int>{3, 3, 1, 1, 1}));
}

TEST(IncidenceMatrix, SmallCases) {
  const std::vector<EdgeInput> one = {{1, std::nullopt}};
  EXPECT_EQ(incidence_matrix(RoutingGraph(1, one)).B, Eigen::MatrixXd::Constant(1, 1, -1));
  const std::vector<EdgeInput> chain = {{1, 2}, {2, std::nullopt}};
  Eigen::MatrixXd expected(2, 2);
  expected << -1, 0, 1, -1;
  EXPECT_EQ(incidence_matrix(RoutingGraph(2, chain)).B, expected);
}

TEST(IncidenceMatrix, ColumnRulesOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, {1, 10});
    const RoutingGraph& g = inst.graph;
    const Eigen::MatrixXd B = incidence_matrix(g).B;
    for (int i = 0; i < g.num_vertices(); ++i) {
      for (int k = g.block_begin(i); k < g.block_end(i); ++k) {
        EXPECT_EQ(B(i, k), -1.0);
        const double sum = B.col(k).sum();
        EXPECT_EQ(sum, g.edge(k).head == g.goal() ? -1.0 : 0.0);
        EXPECT_EQ((B.col(k).array() == -1.0).count(), 1);
        EXPECT_LE((B.col(k).array() == 1.0).count(), 1);
      }
    }
  }
}

TEST(GoalReachable, Cases) {
  EXPECT_EQ(goal_reachable(example1().graph), (std::vector<int>{0, 1, 2, 3, 4}));
  const std::vector<EdgeInput> chain = {{1, 2}, {2, std::nullopt}};
  EXPECT_EQ(goal_reachable(RoutingGraph(2, chain)), (std::vector<int>{0, 1}));
  // 2 has no outgoing edge; 3 routes only through 2.
  const std::vector<EdgeInput> dead = {{1, std::nullopt}, {3, 2}};
  EXPECT_EQ(goal_reachable(RoutingGraph(3, dead)), std::vector<int>{0});
}

TEST(ProblemInstance, ValidatesWeightsAndBounds) {
  const std::vector<EdgeInput> edges = {{1, std::nullopt}};
  auto make = [&](double s, double r, std::optional<double> x, std::optional<double> u) {
    std::optional<Eigen::VectorXd> xv, uv;
    if (x) xv = Eigen::VectorXd::Constant(1, *x);
    if (u) uv = Eigen::VectorXd::Constant(1, *u);
    return make_instance(build_graph(1, edges), Eigen::VectorXd::Constant(1, s),
                         Eigen::VectorXd::Constant(1, r), xv, uv);
  };
  EXPECT_NO_THROW(make(1, 0, std::nullopt, std::nullopt));
  EXPECT_POSROUTE_ERROR(make(0, 1, std::nullopt, std::nullopt), ErrorCode::kNonpositiveS);
  EXPECT_POSROUTE_ERROR(make(1, -1, std::nullopt, std::nullopt), ErrorCode::kNegativeR);
  EXPECT_POSROUTE_ERROR(make(1, 1, 0.0, 1.0), ErrorCode::kInvalidBounds);
  EXPECT_POSROUTE_ERROR(make(1, 1, 1.0, -1.0), ErrorCode::kInvalidBounds);
  EXPECT_POSROUTE_ERROR(make(1, 1, 1.0, std::nullopt), ErrorCode::kInvalidBounds);
}

TEST(ModelIo, ParsesBundledExample) {
  const ProblemInstance file = load_model(std::string(POSROUTE_MODELS_DIR) + "/example1.json");
  const ProblemInstance ref = example1();
  EXPECT_EQ(file.graph.edges(), ref.graph.edges());
  EXPECT_EQ(file.costs.s, ref.costs.s);
  EXPECT_EQ(file.costs.r, ref.costs.r);
  ASSERT_TRUE(file.bounds);
  EXPECT_EQ(file.bounds->u_max, ref.bounds->u_max);
  EXPECT_EQ(instance_hash(file), instance_hash(ref));
}

TEST(ModelIo, HashIgnoresInputEdgeOrder) {
  const std::string a = R"({"n":2,"s":[1,1],"edges":[{"from":1,"to":2,"r":1},{"from":2,"to":"goal"}]})";
  const std::string b = R"({"n":2,"s":[1,1],"edges":[{"from":2,"to":3},{"from":1,"to":2,"r":1}]})";
  EXPECT_EQ(instance_hash(parse_model_text(a)), instance_hash(parse_model_text(b)));
  const std::string c = R"({"n":2,"s":[1,2],"edges":[{"from":2,"to":3},{"from":1,"to":2,"r":1}]})";
  EXPECT_NE(instance_hash(parse_model_text(a)), instance_hash(parse_model_text(c)));
  EXPECT_EQ(instance_hash(parse_model_text(a)).size(), 16u);
}

TEST(ModelIo, DefaultsAndUnconstrainedCase) {
  const ProblemInstance inst = parse_model_text(
      R"({"n":1,"s":[2],"edges":[{"from":1,"to":"goal"}]})");
  EXPECT_EQ(inst.costs.r(0), 0.0);
  EXPECT_FALSE(inst.bounded());
}

TEST(ModelIo, RejectsBadDocuments) {
  EXPECT_POSROUTE_ERROR(parse_model_text("{"), ErrorCode::kInvalidModel);
  EXPECT_POSROUTE_ERROR(parse_model_text(R"({"n":1,"s":[1],"edges":[],"extra":1})"),
                        ErrorCode::kInvalidModel);
  EXPECT_POSROUTE_ERROR(
      parse_model_text(R"({"n":1,"s":[1],"edges":[{"from":1,"to":"goal","cost":1}]})"),
      ErrorCode::kInvalidModel);
  EXPECT_POSROUTE_ERROR(parse_model_text(R"({"n":1,"s":[1,2],"edges":[]})"),
                        ErrorCode::kInvalidModel);
  EXPECT_POSROUTE_ERROR(
      parse_model_text(R"({"n":1,"s":[1],"edges":[{"from":1,"to":"sink"}]})"),
      ErrorCode::kInvalidModel);
  EXPECT_POSROUTE_ERROR(
      parse_model_text(R"({"n":2,"s":[1,1],"x_max":[1,1],"edges":[{"from":1,"to":2,"u_max":1},{"from":2,"to":"goal"}]})"),
      ErrorCode::kInvalidBounds);
  EXPECT_POSROUTE_ERROR(
      parse_model_text(R"({"n":1,"s":[1],"edges":[{"from":1,"to":"goal","u_max":1}]})"),
      ErrorCode::kInvalidBounds);
  EXPECT_POSROUTE_ERROR(parse_model_text(R"({"n":0,"s":[],"edges":[]})"),
                        ErrorCode::kEmptyGraph);
  EXPECT_POSROUTE_ERROR(load_model("/nonexistent/model.json"), ErrorCode::kInvalidModel);
}

}  // namespace
}  // namespace posroute
