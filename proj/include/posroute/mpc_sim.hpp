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

// Closed-loop simulation under the receding-horizon feedback mu_N(x) = u*(0),
// the scaled feedback K Lambda x, or the unconstrained feedback K x.

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "posroute/admissible_controller.hpp"
#include "posroute/error.hpp"
#include "posroute/graph_model.hpp"
#include "posroute/ocp_lp.hpp"
#include "posroute/unconstrained_synthesis.hpp"

namespace posroute {

enum class ControllerKind { kMpc, kScaled, kUnconstrained };

inline const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kMpc: return "mpc";
    case ControllerKind::kScaled: return "scaled";
    case ControllerKind::kUnconstrained: return "unconstrained";
  }
  return "unknown";
}

/// A feedback together with everything needed to evaluate it.
struct ControllerSpec {
  ControllerSpec(ControllerKind k, ProblemInstance inst)
      : kind(k), instance(std::move(inst)) {}

  ControllerKind kind;
  ProblemInstance instance;
  FeedbackGain gain;
  Eigen::MatrixXd B;
  int horizon = 0;                 // kMpc
  SimplexOptions lp_options;       // kMpc
  std::optional<Lambda> lambda;    // kScaled
  Eigen::VectorXd tail_weights;    // p_hat (kScaled) or p (kUnconstrained)

  Eigen::VectorXd control(const Eigen::VectorXd& x) const;
};

namespace detail {

inline ControllerSpec base_spec(const ProblemInstance& inst, ControllerKind kind) {
  ControllerSpec spec(kind, inst);
  spec.B = incidence_matrix(inst.graph).B;
  const ValueVector value = solve_value_vector(inst.graph, inst.costs);
  spec.gain = build_feedback_gain(inst.graph, inst.costs, value.p);
  spec.tail_weights = value.p;
  return spec;
}

}  // namespace detail

/// u*(0) of the deterministic LP solution.
inline Eigen::VectorXd mpc_feedback(const ProblemInstance& inst, int horizon,
                                    const Eigen::VectorXd& x,
                                    const SimplexOptions& opt = {}) {
  return value_function(inst, x, horizon, opt).controls.front();
}

inline ControllerSpec make_mpc(const ProblemInstance& inst, int horizon,
                               const SimplexOptions& opt = {}) {
  if (!inst.bounds) {
    throw Error(ErrorCode::kMissingBounds, "MPC requires capacity bounds");
  }
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  ControllerSpec spec = detail::base_spec(inst, ControllerKind::kMpc);
  spec.horizon = horizon;
  spec.lp_options = opt;
  spec.tail_weights = Eigen::VectorXd();
  return spec;
}

/// Requires lambda in L when the instance is bounded.
inline ControllerSpec make_scaled(const ProblemInstance& inst, const Lambda& lambda) {
  ControllerSpec spec = detail::base_spec(inst, ControllerKind::kScaled);
  if (lambda.size() != inst.n()) {
    throw Error(ErrorCode::kInvalidLambda,
                "lambda has " + std::to_string(lambda.size()) +
                    " entries, expected " + std::to_string(inst.n()));
  }
  spec.lambda = lambda;
  spec.tail_weights =
      closed_loop_cost_vector(lambda, spec.gain, spec.B, inst.costs, inst.bounds);
  return spec;
}

/// Bounded instances are accepted only with an explicit override; the
/// simulator still checks every step against the bounds.
inline ControllerSpec make_unconstrained(const ProblemInstance& inst,
                                         bool allow_bounds = false) {
  if (inst.bounds && !allow_bounds) {
    throw Error(ErrorCode::kInvalidArgument,
                "unconstrained feedback ignores the capacity bounds of this model");
  }
  return detail::base_spec(inst, ControllerKind::kUnconstrained);
}

inline Eigen::VectorXd ControllerSpec::control(const Eigen::VectorXd& x) const {
  switch (kind) {
    case ControllerKind::kMpc: return mpc_feedback(instance, horizon, x, lp_options);
    case ControllerKind::kScaled: return scaled_feedback_apply(*lambda, gain, x);
    case ControllerKind::kUnconstrained: return gain.apply(x);
  }
  return Eigen::VectorXd();
}

enum class Termination { kReachedZero, kMaxSteps };

inline const char* to_string(Termination t) {
  return t == Termination::kReachedZero ? "reached-zero" : "max-steps";
}

struct Trajectory {
  ControllerKind controller = ControllerKind::kUnconstrained;
  std::vector<Eigen::VectorXd> states;    // x(0..T)
  std::vector<Eigen::VectorXd> controls;  // u(0..T-1)
  std::vector<double> stage_costs;        // l(0..T-1)
  double cumulative_cost = 0.0;
  Termination termination = Termination::kMaxSteps;
  double tail = 0.0;  // exact remaining cost from x(T) where one exists

  int steps() const { return static_cast<int>(controls.size()); }
};

inline constexpr double kZeroStateTolerance = 1e-9;
inline constexpr double kAdmissibilityTolerance = 1e-9;

/// Throws AdmissibilityViolation unless u >= 0, 1'u_i <= x_i, u <= u_max and
/// 0 <= x + Bu <= x_max, each to kAdmissibilityTolerance (scaled by the bound).
inline void check_step(const ProblemInstance& inst, const Eigen::MatrixXd& B,
                       int t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kAdmissibilityViolation,
                "step " + std::to_string(t) + ": " + what);
  };
  auto tol = [](double scale) {
    return kAdmissibilityTolerance * (1.0 + std::abs(scale));
  };
  if (u.size() != inst.m()) fail("control has the wrong dimension");
  for (int k = 0; k < inst.m(); ++k) {
    if (!(u(k) >= -kAdmissibilityTolerance)) fail("negative flow on edge " + inst.graph.edge_label(k));
    if (inst.bounds && u(k) > inst.bounds->u_max(k) + tol(inst.bounds->u_max(k))) {
      fail("cap exceeded on edge " + inst.graph.edge_label(k));
    }
  }
  for (int i = 0; i < inst.n(); ++i) {
    const double out =
        u.segment(inst.graph.block_begin(i), inst.graph.block_size(i)).sum();
    if (out > x(i) + tol(x(i))) {
      fail("vertex " + std::to_string(i + 1) + " sends more than it holds");
    }
  }
  const Eigen::VectorXd next = x + B * u;
  for (int i = 0; i < inst.n(); ++i) {
    if (next(i) < -kAdmissibilityTolerance) {
      fail("state " + std::to_string(i + 1) + " becomes negative");
    }
    if (inst.bounds && next(i) > inst.bounds->x_max(i) + tol(inst.bounds->x_max(i))) {
      fail("state " + std::to_string(i + 1) + " exceeds its bound");
    }
  }
}

inline Trajectory simulate(const ControllerSpec& controller,
                           const Eigen::VectorXd& x0, int max_steps) {
  if (max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "step limit must be at least 1");
  }
  const ProblemInstance& inst = controller.instance;
  check_state(inst, x0);
  Trajectory traj;
  traj.controller = controller.kind;
  traj.states.push_back(x0);
  for (int t = 0; t <= max_steps; ++t) {
    const Eigen::VectorXd& x = traj.states.back();
    if (x.lpNorm<1>() <= kZeroStateTolerance) {
      traj.termination = Termination::kReachedZero;
      break;
    }
    if (t == max_steps) break;
    Eigen::VectorXd u = controller.control(x);
    check_step(inst, controller.B, t, x, u);
    const double stage = inst.costs.s.dot(x) + inst.costs.r.dot(u);
    Eigen::VectorXd next = x + controller.B * u;
    traj.stage_costs.push_back(stage);
    traj.cumulative_cost += stage;
    traj.controls.push_back(std::move(u));
    traj.states.push_back(std::move(next));
  }
  if (controller.kind != ControllerKind::kMpc) {
    traj.tail = controller.tail_weights.dot(traj.states.back());
  }
  return traj;
}

struct ClosedLoopCost {
  double value = 0.0;
  bool truncated = false;  // value is only a lower bound
};

/// Cumulative cost plus exact tail. An MPC run that did not reach zero has no
/// exact tail; it throws TruncatedCost unless allow_truncated is set.
inline ClosedLoopCost closed_loop_cost(const Trajectory& traj,
                                       bool allow_truncated = false) {
  ClosedLoopCost out;
  out.value = traj.cumulative_cost + traj.tail;
  out.truncated = traj.controller == ControllerKind::kMpc &&
                  traj.termination != Termination::kReachedZero;
  if (out.truncated && !allow_truncated) {
    throw Error(ErrorCode::kTruncatedCost,
                "MPC run stopped before reaching zero; cost >= " +
                    std::to_string(out.value));
  }
  return out;
}

/// Shortest round-trip decimal form, independent of locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// One row per step t = 0..T-1, then a final row for x(T) whose trailing
/// column carries the tail estimate.
inline void write_csv(std::ostream& out, const Trajectory& traj, int n, int m) {
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int k = 1; k <= m; ++k) out << ",u_" << k;
  out << ",stage_cost,cumulative_cost,tail\n";
  double cumulative = 0.0;
  for (int t = 0; t <= traj.steps(); ++t) {
    out << t;
    for (int i = 0; i < n; ++i) out << ',' << format_number(traj.states[t](i));
    const bool last = t == traj.steps();
    for (int k = 0; k < m; ++k) {
      out << ',';
      if (!last) out << format_number(traj.controls[t](k));
    }
    if (last) {
      out << ",," << format_number(cumulative) << ',' << format_number(traj.tail)
          << '\n';
    } else {
      cumulative += traj.stage_costs[t];
      out << ',' << format_number(traj.stage_costs[t]) << ','
          << format_number(cumulative) << ",\n";
    }
  }
}

}  // namespace posroute
