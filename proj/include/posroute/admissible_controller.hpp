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

// Scaled routing feedback u = K diag(lambda) x.
//
// Each vertex keeps the successor of the unconstrained optimum but only
// forwards the fraction lambda_i of its content. The law is admissible for the
// box constraints iff
//
//   K Lambda x_max <= u_max   and   B K Lambda x_max <= 0,
//
// and its closed-loop cost from x0 is exactly p_hat' x0 with
// p_hat = -(BK)^{-T} (Lambda^{-1} s + K' r).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "posroute/error.hpp"
#include "posroute/graph_model.hpp"
#include "posroute/unconstrained_synthesis.hpp"

namespace posroute {

/// Per-vertex forwarding fractions, each in (0, 1].
class Lambda {
 public:
  explicit Lambda(Eigen::VectorXd values) : values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (!(values_(i) > 0.0 && values_(i) <= 1.0)) {
        throw Error(ErrorCode::kInvalidLambda,
                    "lambda_" + std::to_string(i + 1) + " = " +
                        std::to_string(values_(i)) + " is outside (0, 1]");
      }
    }
  }

  static Lambda ones(Eigen::Index n) {
    return Lambda(Eigen::VectorXd::Ones(n));
  }

  const Eigen::VectorXd& values() const { return values_; }
  double operator()(Eigen::Index i) const { return values_(i); }
  Eigen::Index size() const { return values_.size(); }

 private:
  Eigen::VectorXd values_;
};

enum class RowKind { kLambdaRange, kEdgeCap, kUpstreamState };

inline const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::kLambdaRange: return "lambda_range";
    case RowKind::kEdgeCap: return "edge_cap";
    case RowKind::kUpstreamState: return "upstream_state";
  }
  return "unknown";
}

struct Violation {
  RowKind kind;
  int index;         // edge index for kEdgeCap, vertex index otherwise
  double normalized; // row value divided by its bound
};

struct MembershipResult {
  bool admissible = false;
  std::vector<Violation> violations;
};

inline constexpr double kMembershipTolerance = 1e-12;

/// Decides lambda in L. Rows are normalised by their bound before comparison.
inline MembershipResult membership_L(const Eigen::VectorXd& lambda,
                                     const FeedbackGain& gain,
                                     const Eigen::MatrixXd& B,
                                     const CapacityBounds& bounds) {
  MembershipResult out;
  const Eigen::Index n = lambda.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lambda(i) > 0.0) || lambda(i) > 1.0 + kMembershipTolerance) {
      out.violations.push_back(
          {RowKind::kLambdaRange, static_cast<int>(i), lambda(i)});
    }
  }
  const Eigen::VectorXd scaled = lambda.cwiseProduct(bounds.x_max);
  const Eigen::VectorXd flows = gain.K * scaled;
  for (Eigen::Index k = 0; k < flows.size(); ++k) {
    const double ratio = flows(k) / bounds.u_max(k);
    if (ratio > 1.0 + kMembershipTolerance) {
      out.violations.push_back({RowKind::kEdgeCap, static_cast<int>(k), ratio});
    }
  }
  const Eigen::VectorXd change = B * flows;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ratio = change(i) / bounds.x_max(i);
    if (ratio > kMembershipTolerance) {
      out.violations.push_back(
          {RowKind::kUpstreamState, static_cast<int>(i), ratio});
    }
  }
  out.admissible = out.violations.empty();
  return out;
}

/// A point of L built from v = sum_{j<n} (B_tilde K)^j 1, which satisfies
/// B_tilde K v = v - 1 <= v; lambda = alpha v / x_max with the largest alpha
/// keeping lambda <= 1 and the edge caps.
inline Lambda feasible_lambda(const FeedbackGain& gain,
                              const Eigen::MatrixXd& routing,
                              const CapacityBounds& bounds) {
  const Eigen::Index n = routing.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd term = Eigen::VectorXd::Ones(n);
  for (Eigen::Index j = 1; j < n; ++j) {
    term = routing * term;
    v += term;
  }
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    alpha = std::min(alpha, bounds.x_max(i) / v(i));
  }
  const Eigen::VectorXd flow_per_alpha = gain.K * v;
  for (Eigen::Index k = 0; k < flow_per_alpha.size(); ++k) {
    if (flow_per_alpha(k) > 0.0) {
      alpha = std::min(alpha, bounds.u_max(k) / flow_per_alpha(k));
    }
  }
  Eigen::VectorXd lambda = alpha * v.cwiseQuotient(bounds.x_max);
  // alpha = x_max_i / v_i can round a hair above 1.
  lambda = lambda.cwiseMin(1.0);
  return Lambda(lambda);
}

struct ClosedLoopCertificate {
  Eigen::VectorXd p_hat;
  double gamma = 0.0;
};

/// p_hat by back-substitution along the routing tree:
/// p_hat_i = s_i / lambda_i + r_sel(i) + p_hat_nu(i), p_hat_goal = 0.
/// Membership in L is checked when bounds are given.
inline Eigen::VectorXd closed_loop_cost_vector(
    const Lambda& lambda, const FeedbackGain& gain, const Eigen::MatrixXd& B,
    const CostWeights& costs, const std::optional<CapacityBounds>& bounds) {
  if (bounds) {
    const MembershipResult m = membership_L(lambda.values(), gain, B, *bounds);
    if (!m.admissible) {
      throw Error(ErrorCode::kLambdaNotAdmissible,
                  std::to_string(m.violations.size()) +
                      " admissibility rows violated");
    }
  }
  const int n = static_cast<int>(gain.nu.size());
  Eigen::VectorXd p_hat = Eigen::VectorXd::Zero(n);
  for (int i : goal_first_order(gain.nu)) {
    const int next = gain.nu[i];
    p_hat(i) = costs.s(i) / lambda(i) + costs.r(gain.selected_edge[i]) +
               (next < n ? p_hat(next) : 0.0);
  }
  return p_hat;
}

/// gamma = max_i p_hat_i / s_i.
inline double gamma_of(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& s) {
  return p_hat.cwiseQuotient(s).maxCoeff();
}

inline ClosedLoopCertificate certify(const Lambda& lambda,
                                     const FeedbackGain& gain,
                                     const Eigen::MatrixXd& B,
                                     const CostWeights& costs,
                                     const std::optional<CapacityBounds>& bounds) {
  ClosedLoopCertificate out;
  out.p_hat = closed_loop_cost_vector(lambda, gain, B, costs, bounds);
  out.gamma = gamma_of(out.p_hat, costs.s);
  return out;
}

inline Eigen::VectorXd scaled_feedback_apply(const Lambda& lambda,
                                             const FeedbackGain& gain,
                                             const Eigen::VectorXd& x) {
  return gain.K * lambda.values().cwiseProduct(x);
}

}  // namespace posroute
