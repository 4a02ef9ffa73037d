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


#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "fixtures.hpp"
#include "posroute/admissible_controller.hpp"
#include "posroute/ocp_lp.hpp"

namespace posroute {
namespace {

using testing::example1;
using testing::single_vertex;

void expect_feasible(const LinearProgram& lp, const LpSolution& sol) {
  EXPECT_GE(sol.x.minCoeff(), -1e-9);
  EXPECT_LE((lp.A * sol.x - lp.b).maxCoeff(), 1e-9);
}

TEST(Simplex, SmallLp) {
  // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6.
  LinearProgram lp;
  lp.c = Eigen::Vector2d(-1, -1);
  lp.A.resize(2, 2);
  lp.A << 1, 2, 3, 1;
  lp.b = Eigen::Vector2d(4, 6);
  const LpSolution sol = solve_lp(lp);
  EXPECT_NEAR(sol.objective, -2.8, 1e-12);
  EXPECT_NEAR(sol.x(0), 1.6, 1e-12);
  EXPECT_NEAR(sol.x(1), 1.2, 1e-12);
  EXPECT_LE(complementary_slackness_residual(lp, sol), 1e-12);
}

TEST(Simplex, Errors) {
  LinearProgram unbounded;
  unbounded.c = Eigen::VectorXd::Constant(1, -1.0);
  unbounded.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  unbounded.b = Eigen::VectorXd::Ones(1);
  EXPECT_POSROUTE_ERROR(solve_lp(unbounded), ErrorCode::kUnbounded);
  LinearProgram negative = unbounded;
  negative.b(0) = -1.0;
  EXPECT_POSROUTE_ERROR(solve_lp(negative), ErrorCode::kInfeasibleInput);
  LinearProgram capped;
  capped.c = -Eigen::VectorXd::Ones(3);
  capped.A = Eigen::MatrixXd::Identity(3, 3);
  capped.b = Eigen::VectorXd::Ones(3);
  SimplexOptions opt;
  opt.max_iterations = 1;
  EXPECT_POSROUTE_ERROR(solve_lp(capped, opt), ErrorCode::kMaxIterations);
}

TEST(Simplex, DegenerateLpTerminates) {
  // Beale's example cycles under the textbook largest-coefficient rule.
  LinearProgram lp;
  lp.c = (Eigen::VectorXd(4) << -0.75, 20, -0.5, 6).finished();
  lp.A.resize(3, 4);
  lp.A << 0.25, -8, -1, 9,
          0.5, -12, -0.5, 3,
          0, 0, 1, 0;
  lp.b = Eigen::Vector3d(0, 0, 1);
  const LpSolution sol = solve_lp(lp);
  EXPECT_NEAR(sol.objective, -1.25, 1e-12);
}

TEST(BuildOcp, DimensionsAndRows) {
  const ProblemInstance inst = example1();
  const FiniteOcp ocp = build_ocp(inst, Eigen::VectorXd::Ones(5), 16);
  const int n = 5, m = 9, N = 16;
  EXPECT_EQ(ocp.lp.num_vars(), m * N);
  EXPECT_EQ(ocp.num_constraint_rows(), 2 * m * N + 2 * n * N + n * N);
  EXPECT_TRUE((ocp.lp.b.array() >= 0.0).all());
}

TEST(BuildOcp, RejectsBadArguments) {
  const ProblemInstance inst = example1();
  EXPECT_POSROUTE_ERROR(build_ocp(inst, Eigen::VectorXd::Constant(5, 1.5), 3),
                        ErrorCode::kX0OutOfBounds);
  EXPECT_POSROUTE_ERROR(build_ocp(inst, -Eigen::VectorXd::Ones(5), 3),
                        ErrorCode::kX0OutOfBounds);
  EXPECT_POSROUTE_ERROR(build_ocp(inst, Eigen::VectorXd::Ones(4), 3),
                        ErrorCode::kX0OutOfBounds);
  EXPECT_POSROUTE_ERROR(build_ocp(inst, Eigen::VectorXd::Ones(5), 0),
                        ErrorCode::kInvalidArgument);
}

TEST(ValueFunction, SingleVertexByHand) {
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  // s = 2, r = 1: holding for two steps costs 4, leaving at once costs 2 + 1.
  const ProblemInstance t1 = single_vertex(2, 1, 1, 1);
  const OcpSolution two = value_function(t1, x0, 2);
  EXPECT_NEAR(two.value, 3.0, 1e-12);
  EXPECT_NEAR(two.controls[0](0), 1.0, 1e-12);
  EXPECT_NEAR(two.controls[1](0), 0.0, 1e-12);

  // The last move only adds transport cost.
  const OcpSolution one = value_function(t1, x0, 1);
  EXPECT_NEAR(one.value, 2.0, 1e-12);
  EXPECT_NEAR(one.controls[0](0), 0.0, 1e-12);

  // Cap 1/2: 2 + 0.5 + 2 * 0.5.
  const OcpSolution capped = value_function(single_vertex(2, 1, 1, 0.5), x0, 2);
  EXPECT_NEAR(capped.value, 3.5, 1e-12);
  EXPECT_NEAR(capped.controls[0](0), 0.5, 1e-12);
  EXPECT_NEAR(capped.controls[1](0), 0.0, 1e-12);

  // s = r = 1 ties holding against leaving: only the value is unique.
  EXPECT_NEAR(value_function(single_vertex(), x0, 2).value, 2.0, 1e-12);
}

TEST(ValueFunction, ZeroStateCostsNothing) {
  const ProblemInstance inst = example1();
  for (int N : {1, 4, 16}) {
    const OcpSolution sol = value_function(inst, Eigen::VectorXd::Zero(5), N);
    EXPECT_EQ(sol.value, 0.0);
    for (const auto& u : sol.controls) EXPECT_TRUE(u.isZero(0.0));
  }
}

TEST(ValueFunction, Example1SweepIsMonotoneAndBelowPhat) {
  const ProblemInstance inst = example1();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(5);
  const Eigen::MatrixXd B = incidence_matrix(inst.graph).B;
  const FeedbackGain gain = build_feedback_gain(
      inst.graph, inst.costs, solve_value_vector(inst.graph, inst.costs).p);
  const Eigen::VectorXd lambda = (Eigen::VectorXd(5) << 0.25, 0.25, 1, 0.29, 0.31).finished();
  const double p_hat_sum =
      closed_loop_cost_vector(Lambda(lambda), gain, B, inst.costs, inst.bounds).sum();
  double previous = 0.0;
  for (int N = 1; N <= 16; ++N) {
    const FiniteOcp ocp = build_ocp(inst, x0, N);
    const OcpSolution sol = solve_ocp(ocp);
    expect_feasible(ocp.lp, sol.lp);
    EXPECT_GE(sol.value, previous - 1e-9) << N;
    EXPECT_LE(sol.value, p_hat_sum + 1e-9) << N;
    EXPECT_NEAR(finite_horizon_cost(inst, x0, sol.controls), sol.value, 1e-9);
    EXPECT_LE(complementary_slackness_residual(ocp.lp, sol.lp), 1e-8);
    previous = sol.value;
  }
  EXPECT_NEAR(previous, 56.5, 1e-9);
}

TEST(ValueFunction, UnconstrainedExample1ReachesPx) {
  const ProblemInstance inst = example1(false);
  for (int N = 4; N <= 8; ++N) {
    EXPECT_NEAR(value_function(inst, Eigen::VectorXd::Ones(5), N).value, 40.0, 1e-9);
  }
  const ProblemInstance huge = testing::with_uniform_bounds(example1(), 1e6);
  EXPECT_NEAR(value_function(huge, Eigen::VectorXd::Ones(5), 5).value, 40.0, 1e-9);
}

TEST(ValueFunction, Deterministic) {
  const ProblemInstance inst = example1();
  const OcpSolution a = value_function(inst, Eigen::VectorXd::Ones(5), 10);
  const OcpSolution b = value_function(inst, Eigen::VectorXd::Ones(5), 10);
  EXPECT_EQ(a.lp.basis, b.lp.basis);
  EXPECT_EQ(a.lp.x, b.lp.x);
}

TEST(WriteLp, TextFormat) {
  const FiniteOcp ocp = build_ocp(single_vertex(), Eigen::VectorXd::Ones(1), 1);
  std::ostringstream out;
  write_lp(out, ocp.lp);
  const std::string text = out.str();
  // Rows: mass, upper, lower, cap.
  EXPECT_EQ(text.rfind("lp 1 4\noffset 1\nc 0 1\n", 0), 0u) << text;
  EXPECT_NE(text.find("a 1 0 -1\n"), std::string::npos);
  EXPECT_NE(text.find("b 1 0\nb 2 1\nb 3 1\n"), std::string::npos);
}

TEST(OcpProperty, RandomInstances) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const ProblemInstance inst = testing::random_instance(rng, {1, 6});
    const Eigen::VectorXd x0 = testing::random_state(rng, inst);
    double previous = 0.0;
    for (int N = 1; N <= 8; ++N) {
      const FiniteOcp ocp = build_ocp(inst, x0, N);
      const OcpSolution sol = solve_ocp(ocp);
      expect_feasible(ocp.lp, sol.lp);
      EXPECT_GE(sol.value, previous - 1e-9);
      EXPECT_NEAR(finite_horizon_cost(inst, x0, sol.controls), sol.value,
                  1e-9 * (1.0 + sol.value));
      EXPECT_LE(complementary_slackness_residual(ocp.lp, sol.lp), 1e-8);
      previous = sol.value;
    }
  }
}

}  // namespace
}  // namespace posroute
