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

// Horizon guarantees for MPC without terminal ingredients, given a uniform
// bound V_N(x) <= gamma s'x:
//
//   stability for N > 2 + ln(gamma - 1) / (ln gamma - ln(gamma - 1)),
//   alpha_N = 1 - (gamma - 1)^N / (gamma^(N-1) - (gamma - 1)^(N-1)),
//   J_cl(x0, mu_N) <= V_inf(x0) / alpha_N <= p_hat'x0 / alpha_N.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "posroute/error.hpp"

namespace posroute {

inline constexpr double kGammaOneTolerance = 1e-12;

inline void check_gamma(double gamma) {
  if (!(gamma >= 1.0 - kGammaOneTolerance)) {
    throw Error(ErrorCode::kGammaBelowOne,
                "gamma = " + std::to_string(gamma) + " is below 1");
  }
}

/// Smallest integer N strictly above the stability threshold (at least 2).
inline int minimal_horizon(double gamma) {
  check_gamma(gamma);
  if (gamma <= 1.0 + kGammaOneTolerance) return 2;
  const double log_gap = std::log(gamma - 1.0);
  const double threshold = 2.0 + log_gap / (std::log(gamma) - log_gap);
  // A threshold that is numerically an integer still needs the next one.
  return std::max(2, static_cast<int>(std::floor(threshold + 1e-12)) + 1);
}

/// alpha_N rewritten with q = (gamma - 1) / gamma as
/// 1 - gamma q^N / (1 - q^(N-1)), which cannot overflow.
inline double alpha(double gamma, int horizon) {
  check_gamma(gamma);
  if (horizon < 2) {
    throw Error(ErrorCode::kInvalidArgument, "alpha needs a horizon N >= 2");
  }
  if (gamma <= 1.0 + kGammaOneTolerance) return 1.0;
  const double log_q = std::log1p(-1.0 / gamma);
  const double q_pow_n = std::exp(horizon * log_q);
  const double one_minus_q_pow = -std::expm1((horizon - 1) * log_q);
  return 1.0 - gamma * q_pow_n / one_minus_q_pow;
}

/// Smallest N >= max(2, N0) with alpha_N > alpha_min.
inline int smallest_horizon_for_alpha(double gamma, double alpha_min,
                                      int max_horizon = 10'000'000) {
  if (!(alpha_min > 0.0 && alpha_min < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_min must lie in (0, 1)");
  }
  for (int n = minimal_horizon(gamma); n <= max_horizon; ++n) {
    if (alpha(gamma, n) > alpha_min) return n;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no horizon up to " + std::to_string(max_horizon) +
                  " reaches alpha > " + std::to_string(alpha_min));
}

/// Upper bound p_hat'x0 / alpha_N on the MPC closed-loop cost.
inline double performance_bound(const Eigen::VectorXd& p_hat, double alpha_n,
                                const Eigen::VectorXd& x0) {
  if (!(alpha_n > 0.0 && alpha_n <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_N must lie in (0, 1]");
  }
  return p_hat.dot(x0) / alpha_n;
}

struct HorizonCertificate {
  double gamma = 1.0;
  int N0 = 2;
  std::map<int, double> alpha_table;
};

inline HorizonCertificate horizon_certificate(double gamma, int max_horizon) {
  HorizonCertificate out;
  out.gamma = gamma;
  out.N0 = minimal_horizon(gamma);
  for (int n = out.N0; n <= max_horizon; ++n) out.alpha_table[n] = alpha(gamma, n);
  return out;
}

}  // namespace posroute
