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

// Optimal scaling of the routing feedback as a geometric program:
//
//   minimize gamma  over (gamma, lambda) > 0
//   s.t.  lambda_i <= 1,
//         (K Lambda x_max)_k / u_max_k <= 1            (selected edges)
//         (Lambda^{-1} B_tilde K Lambda x_max)_i / x_max_i <= 1
//         (-(BK)^{-T} (Lambda^{-1} s + K' r))_i / (gamma s_i) <= 1.
//
// In the variables y = (log gamma, log lambda) every row is a log-sum-exp
// function, so the problem is convex. It is solved by a log-barrier method
// with damped Newton steps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "posroute/admissible_controller.hpp"
#include "posroute/error.hpp"
#include "posroute/graph_model.hpp"
#include "posroute/unconstrained_synthesis.hpp"

namespace posroute {

/// Variable 0 is gamma, variable 1 + i is lambda_i.
inline constexpr int kGammaVar = 0;
inline constexpr int lambda_var(int vertex) { return 1 + vertex; }

struct Monomial {
  double coeff = 0.0;
  std::vector<std::pair<int, int>> powers;  // (variable, exponent in {-1,+1})

  double evaluate(const Eigen::VectorXd& vars) const {
    double v = coeff;
    for (const auto& [var, e] : powers) v *= e > 0 ? vars(var) : 1.0 / vars(var);
    return v;
  }
};

enum class GpRowKind { kLambdaUpper, kEdgeCap, kUpstreamState, kBound };

inline const char* to_string(GpRowKind kind) {
  switch (kind) {
    case GpRowKind::kLambdaUpper: return "lambda_upper";
    case GpRowKind::kEdgeCap: return "edge_cap";
    case GpRowKind::kUpstreamState: return "upstream_state";
    case GpRowKind::kBound: return "bound";
  }
  return "unknown";
}

/// A posynomial constraint sum_k terms[k] <= 1.
struct PosynomialRow {
  GpRowKind kind;
  int index;  // edge for kEdgeCap, vertex otherwise
  std::vector<Monomial> terms;

  double evaluate(const Eigen::VectorXd& vars) const {
    double v = 0.0;
    for (const Monomial& t : terms) v += t.evaluate(vars);
    return v;
  }
};

struct GpProblem {
  int num_vertices = 0;
  std::vector<PosynomialRow> rows;

  int num_vars() const { return num_vertices + 1; }
};

/// Builds the rows from the instance, the selector gain and the routing
/// matrix B_tilde K. Rows with an identically zero left-hand side are dropped.
inline GpProblem assemble_gp(const ProblemInstance& inst,
                             const FeedbackGain& gain,
                             const Eigen::MatrixXd& routing) {
  if (!inst.bounds) {
    throw Error(ErrorCode::kMissingBounds, "tuning requires capacity bounds");
  }
  const CapacityBounds& b = *inst.bounds;
  const int n = inst.n();
  GpProblem gp;
  gp.num_vertices = n;

  for (int i = 0; i < n; ++i) {
    gp.rows.push_back({GpRowKind::kLambdaUpper, i, {{1.0, {{lambda_var(i), 1}}}}});
  }
  for (int k = 0; k < inst.m(); ++k) {
    PosynomialRow row{GpRowKind::kEdgeCap, k, {}};
    for (int j = 0; j < n; ++j) {
      if (gain.K(k, j) > 0.0) {
        row.terms.push_back(
            {gain.K(k, j) * b.x_max(j) / b.u_max(k), {{lambda_var(j), 1}}});
      }
    }
    if (!row.terms.empty()) gp.rows.push_back(std::move(row));
  }
  for (int i = 0; i < n; ++i) {
    PosynomialRow row{GpRowKind::kUpstreamState, i, {}};
    for (int j = 0; j < n; ++j) {
      if (routing(i, j) > 0.0) {
        row.terms.push_back({routing(i, j) * b.x_max(j) / b.x_max(i),
                             {{lambda_var(j), 1}, {lambda_var(i), -1}}});
      }
    }
    if (!row.terms.empty()) gp.rows.push_back(std::move(row));
  }
  // -(BK)^{-T} = (I - routing^T)^{-1} has a 1 at (i, j) exactly when j lies
  // on the routed path from i, so row i sums s_j / lambda_j + r_sel(j) along
  // that path.
  for (int i = 0; i < n; ++i) {
    PosynomialRow row{GpRowKind::kBound, i, {}};
    double constant = 0.0;
    for (int j = i; j < n; j = gain.nu[j]) {
      row.terms.push_back({inst.costs.s(j) / inst.costs.s(i),
                           {{kGammaVar, -1}, {lambda_var(j), -1}}});
      constant += inst.costs.r(gain.selected_edge[j]);
    }
    if (constant > 0.0) {
      row.terms.push_back({constant / inst.costs.s(i), {{kGammaVar, -1}}});
    }
    gp.rows.push_back(std::move(row));
  }
  return gp;
}

namespace detail {

struct LseTerm {
  double log_coeff;
  std::vector<std::pair<int, double>> exponents;
};

/// Convex program: minimize c'y s.t. log(sum_k exp(b_k + a_k'y)) <= 0 per row.
struct LseProgram {
  int dim = 0;
  std::vector<std::vector<LseTerm>> rows;
  Eigen::VectorXd objective;
};

inline LseProgram to_lse(const GpProblem& gp) {
  LseProgram prog;
  prog.dim = gp.num_vars();
  prog.objective = Eigen::VectorXd::Zero(prog.dim);
  prog.objective(kGammaVar) = 1.0;
  for (const PosynomialRow& row : gp.rows) {
    std::vector<LseTerm> terms;
    for (const Monomial& m : row.terms) {
      LseTerm t{std::log(m.coeff), {}};
      for (const auto& [var, e] : m.powers) t.exponents.push_back({var, double(e)});
      terms.push_back(std::move(t));
    }
    prog.rows.push_back(std::move(terms));
  }
  return prog;
}

/// Row value and, optionally, gradient and Hessian of the log-sum-exp.
inline double lse_row(const std::vector<LseTerm>& terms, const Eigen::VectorXd& y,
                      Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  std::vector<double> z(terms.size());
  double zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    double v = terms[k].log_coeff;
    for (const auto& [var, a] : terms[k].exponents) v += a * y(var);
    z[k] = v;
    zmax = std::max(zmax, v);
  }
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  const double value = zmax + std::log(sum);
  if (grad) {
    grad->setZero(y.size());
    if (hess) hess->setZero(y.size(), y.size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double w = z[k] / sum;
      for (const auto& [var, a] : terms[k].exponents) {
        (*grad)(var) += w * a;
        if (hess) {
          for (const auto& [var2, a2] : terms[k].exponents) {
            (*hess)(var, var2) += w * a * a2;
          }
        }
      }
    }
    if (hess) *hess -= (*grad) * grad->transpose();
  }
  return value;
}

struct BarrierOptions {
  double t0 = 1.0;
  double mu = 10.0;
  double gap_tolerance = 1e-8;        // rows / t
  double decrement_tolerance = 1e-10; // Newton decrement^2 / 2
  int max_newton_per_center = 200;
  int max_outer = 60;
  // Stop as soon as the objective falls below this value.
  double stop_below = -std::numeric_limits<double>::infinity();
};

struct BarrierResult {
  Eigen::VectorXd y;
  int iterations = 0;
  double t = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool stopped_early = false;
};

inline BarrierResult minimize_lse(const LseProgram& prog, Eigen::VectorXd y,
                                  const BarrierOptions& opt) {
  const int dim = prog.dim;
  const double rows = static_cast<double>(prog.rows.size());
  BarrierResult res;

  std::vector<double> f(prog.rows.size());
  auto strictly_feasible = [&](const Eigen::VectorXd& point,
                               std::vector<double>& values) {
    for (std::size_t j = 0; j < prog.rows.size(); ++j) {
      values[j] = lse_row(prog.rows[j], point, nullptr, nullptr);
      if (!(values[j] < 0.0)) return false;
    }
    return true;
  };
  if (!strictly_feasible(y, f)) {
    throw Error(ErrorCode::kInfeasibleInput,
                "barrier start point is not strictly feasible");
  }

  double t = opt.t0;
  Eigen::VectorXd grad(dim), g_row(dim);
  Eigen::MatrixXd hess(dim, dim), h_row(dim, dim);
  std::vector<double> f_new(prog.rows.size());
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    bool centered = false;
    for (int it = 0; it < opt.max_newton_per_center; ++it) {
      grad = t * prog.objective;
      hess.setZero();
      for (std::size_t j = 0; j < prog.rows.size(); ++j) {
        f[j] = lse_row(prog.rows[j], y, &g_row, &h_row);
        const double slack = -f[j];
        grad += g_row / slack;
        hess += g_row * g_row.transpose() / (slack * slack) + h_row / slack;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        const double reg = 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
        step = (hess + reg * Eigen::MatrixXd::Identity(dim, dim))
                   .ldlt()
                   .solve(-grad);
      }
      const double slope = grad.dot(step);
      const double decrement = -slope / 2.0;
      // At a centred point rows / t bounds the suboptimality of the objective.
      res.kkt_residual = rows / t + decrement;
      if (decrement <= opt.decrement_tolerance) {
        centered = true;
        break;
      }
      // Backtracking with feasibility; the change in the barrier objective is
      // accumulated term by term to avoid cancellation at large t.
      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Eigen::VectorXd trial = y + alpha * step;
        if (strictly_feasible(trial, f_new)) {
          double delta = t * alpha * prog.objective.dot(step);
          for (std::size_t j = 0; j < f.size(); ++j) {
            delta += std::log(f[j] / f_new[j]);
          }
          if (delta <= 0.25 * alpha * slope) {
            y = trial;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      ++res.iterations;
      if (!accepted) {
        // Stagnation close to the center is harmless; a failure far from it
        // is a numerical breakdown.
        if (decrement <= 1e-7) {
          centered = true;
          break;
        }
        res.y = y;
        res.t = t;
        return res;
      }
      if (prog.objective.dot(y) < opt.stop_below) {
        res.y = y;
        res.t = t;
        res.stopped_early = true;
        return res;
      }
    }
    if (!centered) {
      res.y = y;
      res.t = t;
      return res;
    }
    if (rows / t < opt.gap_tolerance) {
      res.converged = true;
      break;
    }
    t *= opt.mu;
  }
  res.y = y;
  res.t = t;
  return res;
}

}  // namespace detail

struct GpSolution {
  double gamma_star = 0.0;
  Lambda lambda_star = Lambda::ones(1);
  double kkt_residual = 0.0;
  int iterations = 0;
  bool degraded = false;      // best feasible iterate after a solver failure
  std::string method;         // "barrier" or "bisection"
  std::vector<int> binding_rows;  // indices into GpProblem::rows
  std::vector<int> free_lambdas;  // in no binding row: optimum not unique
};

namespace detail {

/// max_i p_hat_i / s_i, read off the bound rows at gamma = 1.
inline double gamma_from_rows(const GpProblem& gp, const Eigen::VectorXd& lambda) {
  Eigen::VectorXd vars(gp.num_vars());
  vars(kGammaVar) = 1.0;
  vars.tail(gp.num_vertices) = lambda;
  double gamma = 0.0;
  for (const PosynomialRow& row : gp.rows) {
    if (row.kind == GpRowKind::kBound) gamma = std::max(gamma, row.evaluate(vars));
  }
  return gamma;
}

inline void classify_rows(const GpProblem& gp, GpSolution& sol) {
  Eigen::VectorXd vars(gp.num_vars());
  vars(kGammaVar) = sol.gamma_star;
  vars.tail(gp.num_vertices) = sol.lambda_star.values();
  std::vector<char> pinned(gp.num_vertices, 0);
  for (std::size_t j = 0; j < gp.rows.size(); ++j) {
    if (gp.rows[j].evaluate(vars) >= 1.0 - 1e-6) {
      sol.binding_rows.push_back(static_cast<int>(j));
      for (const Monomial& m : gp.rows[j].terms) {
        for (const auto& [var, e] : m.powers) {
          if (var != kGammaVar) pinned[var - 1] = 1;
        }
      }
    }
  }
  for (int i = 0; i < gp.num_vertices; ++i) {
    if (!pinned[i]) sol.free_lambdas.push_back(i);
  }
}

inline GpSolution make_solution(const GpProblem& gp, const Eigen::VectorXd& z,
                                std::string method) {
  GpSolution sol;
  Eigen::VectorXd lambda = z.array().exp().min(1.0).matrix();
  sol.lambda_star = Lambda(lambda);
  sol.gamma_star = gamma_from_rows(gp, lambda);
  sol.method = std::move(method);
  return sol;
}

}  // namespace detail

/// Strictly feasible start: the scaled constructive point of L and a gamma
/// above its bound.
inline Eigen::VectorXd gp_start_point(const GpProblem& gp,
                                      const Eigen::VectorXd& lambda_feasible) {
  Eigen::VectorXd lambda = 0.99 * lambda_feasible;
  Eigen::VectorXd y(gp.num_vars());
  y(kGammaVar) = std::log(1.1 * detail::gamma_from_rows(gp, lambda));
  y.tail(gp.num_vertices) = lambda.array().log().matrix();
  return y;
}

/// Fallback: bisection on gamma with a phase-I feasibility problem per
/// candidate. Slower but only needs feasibility detection.
inline GpSolution solve_gp_bisection(const GpProblem& gp,
                                     const Eigen::VectorXd& lambda_feasible,
                                     double relative_tolerance = 1e-9) {
  const int n = gp.num_vertices;
  Eigen::VectorXd z_best = (0.99 * lambda_feasible).array().log().matrix();
  double hi = detail::gamma_from_rows(gp, z_best.array().exp().matrix());
  double lo = 1.0;
  int iterations = 0;

  // Variables (z, sigma): rows f_j(z; gamma) - sigma <= 0, minimise sigma.
  auto feasible_at = [&](double gamma, Eigen::VectorXd& z) {
    detail::LseProgram prog;
    prog.dim = n + 1;
    prog.objective = Eigen::VectorXd::Zero(n + 1);
    prog.objective(n) = 1.0;
    for (const PosynomialRow& row : gp.rows) {
      std::vector<detail::LseTerm> terms;
      for (const Monomial& m : row.terms) {
        detail::LseTerm t{std::log(m.coeff), {{n, -1.0}}};
        for (const auto& [var, e] : m.powers) {
          if (var == kGammaVar) {
            t.log_coeff += e * std::log(gamma);
          } else {
            t.exponents.push_back({var - 1, double(e)});
          }
        }
        terms.push_back(std::move(t));
      }
      prog.rows.push_back(std::move(terms));
    }
    Eigen::VectorXd y(n + 1);
    y.head(n) = z;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& row : prog.rows) {
      Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + 1);
      y0.head(n) = z;
      worst = std::max(worst, detail::lse_row(row, y0, nullptr, nullptr));
    }
    y(n) = worst + 1.0;
    detail::BarrierOptions opt;
    opt.stop_below = -1e-9;
    opt.gap_tolerance = 1e-10;
    const detail::BarrierResult r = detail::minimize_lse(prog, y, opt);
    iterations += r.iterations;
    if (r.y(n) < 0.0) {
      z = r.y.head(n);
      return true;
    }
    return false;
  };

  while (hi - lo > relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    Eigen::VectorXd z = z_best;
    if (feasible_at(mid, z)) {
      z_best = z;
      hi = std::min(mid, detail::gamma_from_rows(gp, z.array().exp().matrix()));
    } else {
      lo = mid;
    }
  }
  GpSolution sol = detail::make_solution(gp, z_best, "bisection");
  sol.iterations = iterations;
  sol.kkt_residual = (hi - lo) / hi;
  detail::classify_rows(gp, sol);
  return sol;
}

/// Global optimum of the geometric program. The barrier path is primary; on
/// a Newton breakdown the bisection fallback recomputes the optimum and the
/// result is flagged as degraded if that also falls short.
inline GpSolution solve_gp(const GpProblem& gp,
                           const Eigen::VectorXd& lambda_feasible) {
  const detail::LseProgram prog = detail::to_lse(gp);
  const Eigen::VectorXd y0 = gp_start_point(gp, lambda_feasible);
  const detail::BarrierResult r = detail::minimize_lse(prog, y0, {});

  if (!r.converged || r.kkt_residual > 1e-6) {
    GpSolution fallback = solve_gp_bisection(gp, lambda_feasible);
    fallback.degraded = fallback.kkt_residual > 1e-6;
    fallback.iterations += r.iterations;
    return fallback;
  }
  GpSolution sol =
      detail::make_solution(gp, r.y.tail(gp.num_vertices), "barrier");
  sol.iterations = r.iterations;
  sol.kkt_residual = r.kkt_residual;
  detail::classify_rows(gp, sol);
  return sol;
}

struct CertificateReport {
  double max_violation = 0.0;  // max over rows of (value - 1)
  int worst_row = -1;
  double gamma_recomputed = 0.0;
  double gamma_relative_error = 0.0;
};

/// Re-evaluates every row at (gamma, lambda) in the original variables and
/// cross-checks gamma against the closed-loop cost vector. Throws
/// CertificateMismatch on a violated row or a gamma disagreement.
inline CertificateReport certificate_check(double gamma,
                                           const Eigen::VectorXd& lambda,
                                           const GpProblem& gp,
                                           const ProblemInstance& inst,
                                           const FeedbackGain& gain,
                                           const Eigen::MatrixXd& B) {
  CertificateReport rep;
  Eigen::VectorXd vars(gp.num_vars());
  vars(kGammaVar) = gamma;
  vars.tail(gp.num_vertices) = lambda;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < gp.rows.size(); ++j) {
    const double v = gp.rows[j].evaluate(vars) - 1.0;
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_row = static_cast<int>(j);
    }
  }
  if (rep.max_violation > 1e-8) {
    const PosynomialRow& row = gp.rows[rep.worst_row];
    throw Error(ErrorCode::kCertificateMismatch,
                std::string(to_string(row.kind)) + " row " +
                    std::to_string(row.index + 1) + " violated by " +
                    std::to_string(rep.max_violation));
  }
  Lambda checked(lambda);
  rep.gamma_recomputed = gamma_of(
      closed_loop_cost_vector(checked, gain, B, inst.costs, inst.bounds),
      inst.costs.s);
  rep.gamma_relative_error =
      std::abs(rep.gamma_recomputed - gamma) / rep.gamma_recomputed;
  if (rep.gamma_relative_error > 1e-6) {
    throw Error(ErrorCode::kCertificateMismatch,
                "gamma " + std::to_string(gamma) + " disagrees with p_hat bound " +
                    std::to_string(rep.gamma_recomputed));
  }
  return rep;
}

inline CertificateReport certificate_check(const GpSolution& sol,
                                           const GpProblem& gp,
                                           const ProblemInstance& inst,
                                           const FeedbackGain& gain,
                                           const Eigen::MatrixXd& B) {
  return certificate_check(sol.gamma_star, sol.lambda_star.values(), gp, inst,
                           gain, B);
}

}  // namespace posroute
