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

// Command-line front end. run_cli is the whole program minus process setup,
// so tests can drive it in-process.
//
// Exit codes: 0 success, 1 numerical failure, 2 input error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "posroute/admissible_controller.hpp"
#include "posroute/error.hpp"
#include "posroute/gp_solver.hpp"
#include "posroute/graph_model.hpp"
#include "posroute/horizon_bounds.hpp"
#include "posroute/model_io.hpp"
#include "posroute/mpc_sim.hpp"
#include "posroute/ocp_lp.hpp"
#include "posroute/unconstrained_synthesis.hpp"
#include "reference_model.hpp"

namespace posroute::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitInput = 2 };

inline constexpr const char* kToleranceEnv = "POSROUTE_TOLERANCE";

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string output_path;
  std::string controller = "mpc";
  std::string x0 = "xbar";
  std::string lambda;
  std::string csv_path;
  std::string csv_dir;
  std::string export_lp;
  int horizon = 0;
  int steps = 200;
  double gamma = 0.0;
  double alpha_min = 0.5;
  int n_max = 0;
  bool override_bounds = false;
  SimplexOptions lp;
};

// ---------------------------------------------------------------------------
// Helpers

inline Json to_array(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, what + ": cannot parse '" + item + "'");
    }
  }
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, what + " is empty");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Eigen::VectorXd resolve_x0(const ProblemInstance& inst, const std::string& spec) {
  if (spec == "zero") return Eigen::VectorXd::Zero(inst.n());
  if (spec == "xbar") {
    if (!inst.bounds) {
      throw Error(ErrorCode::kMissingBounds, "--x0 xbar requires capacity bounds");
    }
    return inst.bounds->x_max;
  }
  Eigen::VectorXd x = parse_vector(spec, "--x0");
  if (x.size() != inst.n()) {
    throw Error(ErrorCode::kX0OutOfBounds,
                "--x0 has " + std::to_string(x.size()) + " entries, expected " +
                    std::to_string(inst.n()));
  }
  return x;
}

inline Lambda resolve_lambda(const ProblemInstance& inst, const std::string& spec) {
  Eigen::VectorXd v = parse_vector(spec, "--lambda");
  if (v.size() != inst.n()) {
    throw Error(ErrorCode::kInvalidLambda,
                "--lambda has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(inst.n()));
  }
  return Lambda(std::move(v));
}

inline Json report_header(const std::string& command, const ProblemInstance* inst) {
  Json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  if (inst) j["instance_hash"] = instance_hash(*inst);
  return j;
}

struct Synthesis {
  ValueVector value;
  Eigen::MatrixXd B;
  FeedbackGain gain;
  PositivePartSplit split;
};

inline Synthesis synthesize(const ProblemInstance& inst) {
  const std::vector<int> dangling = inst.graph.dangling_vertices();
  if (!dangling.empty()) {
    std::string names;
    for (int v : dangling) names += (names.empty() ? "" : ", ") + std::to_string(v + 1);
    throw Error(ErrorCode::kUnreachableGoal,
                "vertex " + names + " has no outgoing edge, so the goal is unreachable");
  }
  Synthesis s;
  s.value = solve_value_vector(inst.graph, inst.costs);
  s.B = incidence_matrix(inst.graph).B;
  s.gain = build_feedback_gain(inst.graph, inst.costs, s.value.p);
  s.split = split_positive_part(s.B, s.gain);
  return s;
}

struct Tuning {
  GpProblem gp;
  GpSolution solution;
  CertificateReport certificate;
  Eigen::VectorXd p_hat;
};

inline Tuning tune(const ProblemInstance& inst, const Synthesis& s) {
  Tuning t;
  t.gp = assemble_gp(inst, s.gain, s.split.routing);
  const Lambda start = feasible_lambda(s.gain, s.split.routing, *inst.bounds);
  t.solution = solve_gp(t.gp, start.values());
  if (t.solution.degraded) {
    throw Error(ErrorCode::kNumericalFailure,
                "geometric program did not converge (residual " +
                    std::to_string(t.solution.kkt_residual) + ")");
  }
  t.certificate = certificate_check(t.solution, t.gp, inst, s.gain, s.B);
  t.p_hat = closed_loop_cost_vector(t.solution.lambda_star, s.gain, s.B, inst.costs,
                                    inst.bounds);
  return t;
}

inline Json alpha_table(const HorizonCertificate& c) {
  Json table = Json::object();
  for (const auto& [n, a] : c.alpha_table) table[std::to_string(n)] = a;
  return table;
}

/// N0, the horizon reaching alpha_min and the alpha table up to n_max (or up
/// to that horizon when n_max is 0).
inline Json horizon_report(double gamma, double alpha_min, int n_max) {
  Json j;
  const int n0 = minimal_horizon(gamma);
  const int n_alpha = smallest_horizon_for_alpha(gamma, alpha_min);
  const int last = n_max > 0 ? n_max : n_alpha;
  j["N0"] = n0;
  j["alpha_min"] = alpha_min;
  j["horizon_for_alpha_min"] = n_alpha;
  j["alpha_table"] = alpha_table(horizon_certificate(gamma, last));
  return j;
}

inline void emit(const RunConfig& cfg, const Json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output_path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + cfg.output_path);
  file << text;
}

inline void write_csv_file(const std::string& path, const Trajectory& traj,
                           const ProblemInstance& inst) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  write_csv(file, traj, inst.n(), inst.m());
}

inline ProblemInstance load(const RunConfig& cfg) {
  if (cfg.model_path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--model is required");
  }
  return load_model(cfg.model_path);
}

// ---------------------------------------------------------------------------
// Commands

inline Json cmd_synthesize(const RunConfig& cfg) {
  const ProblemInstance inst = load(cfg);
  const Synthesis s = synthesize(inst);
  Json j = report_header("synthesize", &inst);
  j["p"] = to_array(s.value.p);
  Json nu = Json::array(), edges = Json::array();
  for (int i = 0; i < inst.n(); ++i) {
    nu.push_back(vertex_label(s.gain.nu[i], inst.n()));
    edges.push_back(inst.graph.edge_label(s.gain.selected_edge[i]));
  }
  j["nu"] = nu;
  j["selected_edges"] = edges;
  j["residual_max"] = s.value.residual.lpNorm<Eigen::Infinity>();
  return j;
}

inline Json cmd_certify(const RunConfig& cfg) {
  const ProblemInstance inst = load(cfg);
  if (cfg.lambda.empty()) throw Error(ErrorCode::kInvalidArgument, "--lambda is required");
  const Synthesis s = synthesize(inst);
  const Lambda lambda = resolve_lambda(inst, cfg.lambda);
  Json j = report_header("certify", &inst);
  j["lambda"] = to_array(lambda.values());
  bool admissible = true;
  if (inst.bounds) {
    const MembershipResult m = membership_L(lambda.values(), s.gain, s.B, *inst.bounds);
    admissible = m.admissible;
    Json rows = Json::array();
    for (const Violation& v : m.violations) {
      Json row;
      row["kind"] = to_string(v.kind);
      row["row"] = v.kind == RowKind::kEdgeCap ? inst.graph.edge_label(v.index)
                                                : std::to_string(v.index + 1);
      row["normalized"] = v.normalized;
      rows.push_back(row);
    }
    j["violations"] = rows;
  }
  j["admissible"] = admissible;
  j["verdict"] = admissible ? "IN" : "OUT";
  if (admissible) {
    const ClosedLoopCertificate c = certify(lambda, s.gain, s.B, inst.costs, inst.bounds);
    j["p_hat"] = to_array(c.p_hat);
    j["p_hat_sum"] = c.p_hat.sum();
    j["gamma"] = c.gamma;
  }
  return j;
}

inline Json binding_rows(const Tuning& t, const ProblemInstance& inst) {
  Json rows = Json::array();
  for (int idx : t.solution.binding_rows) {
    const PosynomialRow& row = t.gp.rows[idx];
    Json r;
    r["kind"] = to_string(row.kind);
    r["row"] = row.kind == GpRowKind::kEdgeCap ? inst.graph.edge_label(row.index)
                                               : std::to_string(row.index + 1);
    rows.push_back(r);
  }
  return rows;
}

inline Json cmd_tune(const RunConfig& cfg) {
  const ProblemInstance inst = load(cfg);
  const Synthesis s = synthesize(inst);
  const Tuning t = tune(inst, s);
  Json j = report_header("tune", &inst);
  j["gamma_star"] = t.solution.gamma_star;
  j["lambda_star"] = to_array(t.solution.lambda_star.values());
  Json free = Json::array();
  for (int i : t.solution.free_lambdas) free.push_back(i + 1);
  j["non_unique_lambda"] = free;
  j["binding_constraints"] = binding_rows(t, inst);
  j["method"] = t.solution.method;
  j["iterations"] = t.solution.iterations;
  j["kkt_residual"] = t.solution.kkt_residual;
  j["certificate"] = {{"max_violation", t.certificate.max_violation},
                      {"gamma_relative_error", t.certificate.gamma_relative_error}};
  j["p_hat"] = to_array(t.p_hat);
  j["horizon"] = horizon_report(t.solution.gamma_star, cfg.alpha_min, cfg.n_max);
  return j;
}

inline Json cmd_bound(const RunConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--gamma is required");
  Json j = report_header("bound", nullptr);
  j["gamma"] = cfg.gamma;
  const Json h = horizon_report(cfg.gamma, cfg.alpha_min, cfg.n_max);
  for (auto it = h.begin(); it != h.end(); ++it) j[it.key()] = it.value();
  return j;
}

inline Json cmd_value(const RunConfig& cfg) {
  const ProblemInstance inst = load(cfg);
  if (cfg.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "--horizon N >= 1 is required");
  const Eigen::VectorXd x0 = resolve_x0(inst, cfg.x0);
  const FiniteOcp ocp = build_ocp(inst, x0, cfg.horizon);
  if (!cfg.export_lp.empty()) {
    std::ofstream file(cfg.export_lp, std::ios::binary);
    if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + cfg.export_lp);
    write_lp(file, ocp.lp);
  }
  const OcpSolution sol = solve_ocp(ocp, cfg.lp);
  Json j = report_header("value", &inst);
  j["horizon"] = cfg.horizon;
  j["x0"] = to_array(x0);
  j["value"] = sol.value;
  Json controls = Json::array();
  for (const Eigen::VectorXd& u : sol.controls) controls.push_back(to_array(u));
  j["controls"] = controls;
  j["lp"] = {{"variables", ocp.lp.num_vars()},
             {"rows", ocp.num_constraint_rows()},
             {"iterations", sol.lp.iterations},
             {"complementary_slackness", complementary_slackness_residual(ocp.lp, sol.lp)}};
  return j;
}

inline Json trajectory_summary(const Trajectory& traj) {
  Json j;
  const ClosedLoopCost J = closed_loop_cost(traj, true);
  j["steps"] = traj.steps();
  j["termination"] = to_string(traj.termination);
  j["J"] = J.value;
  j["truncated"] = J.truncated;
  j["cumulative_cost"] = traj.cumulative_cost;
  j["tail"] = traj.tail;
  if (traj.steps() > 0) j["x1"] = to_array(traj.states[1]);
  j["x_final"] = to_array(traj.states.back());
  return j;
}

inline Json cmd_simulate(const RunConfig& cfg) {
  const ProblemInstance inst = load(cfg);
  const std::string& kind = cfg.controller;
  if (kind != "mpc" && kind != "scaled" && kind != "unconstrained") {
    throw Error(ErrorCode::kInvalidArgument, "unknown controller '" + kind + "'");
  }
  if (!cfg.lambda.empty() && kind != "scaled") {
    throw Error(ErrorCode::kInvalidArgument, "--lambda applies to the scaled controller only");
  }
  if (cfg.horizon != 0 && kind != "mpc") {
    throw Error(ErrorCode::kInvalidArgument, "--horizon applies to the mpc controller only");
  }
  if (cfg.override_bounds && kind != "unconstrained") {
    throw Error(ErrorCode::kInvalidArgument,
                "--override-bounds applies to the unconstrained controller only");
  }
  const Eigen::VectorXd x0 = resolve_x0(inst, cfg.x0);
  const Synthesis s = synthesize(inst);

  Json j = report_header("simulate", &inst);
  j["controller"] = kind;
  std::optional<Tuning> t;
  if (inst.bounds && kind != "unconstrained") t = tune(inst, s);

  if (kind == "mpc" && !inst.bounds) {
    throw Error(ErrorCode::kMissingBounds, "MPC requires capacity bounds");
  }
  // Without --horizon the MPC uses the shortest horizon certified for alpha_min.
  const int horizon = kind != "mpc" ? 0
                      : cfg.horizon > 0
                          ? cfg.horizon
                          : smallest_horizon_for_alpha(t->solution.gamma_star, cfg.alpha_min);

  std::optional<ControllerSpec> spec;
  if (kind == "mpc") {
    spec = make_mpc(inst, horizon, cfg.lp);
    j["horizon"] = horizon;
  } else if (kind == "scaled") {
    if (cfg.lambda.empty()) {
      if (!t) {
        throw Error(ErrorCode::kMissingBounds,
                    "the scaled controller needs --lambda or capacity bounds");
      }
      spec = make_scaled(inst, t->solution.lambda_star);
      j["lambda_source"] = "tuned";
    } else {
      spec = make_scaled(inst, resolve_lambda(inst, cfg.lambda));
      j["lambda_source"] = "given";
    }
    j["lambda"] = to_array(spec->lambda->values());
  } else {
    spec = make_unconstrained(inst, cfg.override_bounds);
  }
  j["x0"] = to_array(x0);

  const Trajectory traj = simulate(*spec, x0, cfg.steps);
  if (!cfg.csv_path.empty()) write_csv_file(cfg.csv_path, traj, inst);
  j["summary"] = trajectory_summary(traj);

  const double J = closed_loop_cost(traj, true).value;
  Json bound;
  if (kind == "mpc") {
    const double gamma = t->solution.gamma_star;
    const int n0 = minimal_horizon(gamma);
    bound["gamma"] = gamma;
    bound["N0"] = n0;
    if (horizon >= std::max(2, n0)) {
      const double a = alpha(gamma, horizon);
      const double upper = performance_bound(t->p_hat, a, x0);
      const double lower = value_function(inst, x0, horizon, cfg.lp).value;
      bound["alpha_N"] = a;
      bound["lower"] = lower;
      bound["upper"] = upper;
      bound["holds"] = lower <= J + 1e-9 && J <= upper + 1e-9 &&
                       traj.termination == Termination::kReachedZero;
    } else {
      bound["certified"] = false;
      bound["reason"] = "horizon below N0";
    }
  } else {
    const double exact = spec->tail_weights.dot(x0);
    bound["exact"] = exact;
    bound["holds"] = std::abs(J - exact) <= 1e-8 * (1.0 + std::abs(exact));
  }
  j["bound"] = bound;
  return j;
}

// ---------------------------------------------------------------------------
// reproduce-paper: the bundled reference instance against stored values.

struct Check {
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool soft = false;

  bool pass() const { return std::abs(value - expected) <= tolerance; }
};

inline Json check_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["expected"] = c.expected;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass();
  if (c.soft) j["soft"] = true;
  return j;
}

inline Json cmd_reproduce(const RunConfig& cfg, bool& all_passed) {
  const ProblemInstance inst = parse_model_text(kReferenceModel);
  const Synthesis s = synthesize(inst);
  const Tuning t = tune(inst, s);
  const Eigen::VectorXd x0 = inst.bounds->x_max;
  std::vector<Check> checks;

  const Eigen::VectorXd p_ref = (Eigen::VectorXd(5) << 19, 8, 2, 6, 5).finished();
  checks.push_back({"p", (s.value.p - p_ref).lpNorm<Eigen::Infinity>(), 0.0, 1e-9});
  const std::vector<int> nu_ref = {1, 2, 5, 2, 2};
  checks.push_back({"nu_mismatches", double(s.gain.nu != nu_ref), 0.0, 0.0});

  const Eigen::VectorXd& lambda = t.solution.lambda_star.values();
  checks.push_back({"gamma_star", t.solution.gamma_star, 6.4, 0.05});
  checks.push_back({"lambda_1", lambda(0), 0.25, 1e-6});
  checks.push_back({"lambda_2", lambda(1), 0.25, 1e-6});
  checks.push_back({"lambda_4", lambda(3), 0.29, 0.01, true});
  checks.push_back({"lambda_5", lambda(4), 0.31, 0.01, true});

  checks.push_back({"N0", double(minimal_horizon(6.4)), 12, 0});
  checks.push_back({"alpha_16", alpha(6.4, 16), 0.54, 0.005});
  checks.push_back({"horizon_for_alpha_0.5", double(smallest_horizon_for_alpha(6.4, 0.5)), 16, 0});

  const Trajectory mpc = simulate(make_mpc(inst, 16, cfg.lp), x0, 200);
  const Eigen::VectorXd mpc_x1 = (Eigen::VectorXd(5) << 0.25, 0.75, 1, 1, 1).finished();
  checks.push_back({"mpc_J", closed_loop_cost(mpc, true).value, 56.5, 0.1});
  checks.push_back({"mpc_steps_to_zero",
                    mpc.termination == Termination::kReachedZero ? double(mpc.steps()) : -1.0,
                    5, 1});
  checks.push_back({"mpc_x1_error", (mpc.states[1] - mpc_x1).lpNorm<Eigen::Infinity>(), 0.0,
                    1e-9});

  const Trajectory scaled = simulate(make_scaled(inst, t.solution.lambda_star), x0, 200);
  const double scaled_J = closed_loop_cost(scaled).value;
  const Eigen::VectorXd scaled_x1 =
      (Eigen::VectorXd(5) << 0.75, 1, 0.8427, 0.7124, 0.695).finished();
  checks.push_back({"scaled_J", scaled_J, 111.97, 0.05});
  checks.push_back({"scaled_J_minus_p_hat_sum", scaled_J - t.p_hat.dot(x0), 0.0, 1e-6});
  checks.push_back({"scaled_x1_error", (scaled.states[1] - scaled_x1).lpNorm<Eigen::Infinity>(),
                    0.0, 5e-4});

  const double upper = performance_bound(t.p_hat, alpha(t.solution.gamma_star, 16), x0);
  checks.push_back({"mpc_J_within_bound", double(closed_loop_cost(mpc, true).value <= upper),
                    1, 0});

  if (!cfg.csv_dir.empty()) {
    write_csv_file(cfg.csv_dir + "/mpc.csv", mpc, inst);
    write_csv_file(cfg.csv_dir + "/scaled.csv", scaled, inst);
  }

  Json j = report_header("reproduce-paper", &inst);
  Json list = Json::array();
  all_passed = true;
  for (const Check& c : checks) {
    list.push_back(check_json(c));
    if (!c.soft && !c.pass()) all_passed = false;
  }
  j["lambda_star"] = to_array(lambda);
  j["checks"] = list;
  j["all_passed"] = all_passed;
  return j;
}

// ---------------------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Optimal and constrained routing of positive networks"};
  app.name("posroute");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  double tolerance = 1e-9;
  if (const char* env = std::getenv(kToleranceEnv)) {
    try {
      std::size_t used = 0;
      tolerance = std::stod(env, &used);
      if (used != std::string(env).size() || !(tolerance > 0.0)) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      err << "error: InvalidArgument: " << kToleranceEnv << " must be a positive number\n";
      return kExitInput;
    }
  }
  app.add_option("--tol", tolerance, "LP feasibility and optimality tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("-o,--output", cfg.output_path, "Write the JSON report to a file");

  auto model_opt = [&](CLI::App* sub) {
    sub->add_option("-m,--model", cfg.model_path, "Model file (JSON)")->required();
  };
  auto horizon_opts = [&](CLI::App* sub) {
    sub->add_option("--alpha-min", cfg.alpha_min, "Target suboptimality index")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--n-max", cfg.n_max, "Last horizon in the alpha table")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* synth = app.add_subcommand("synthesize", "Value vector and optimal routing");
  model_opt(synth);
  CLI::App* cert = app.add_subcommand("certify", "Admissibility and cost of a scaling");
  model_opt(cert);
  cert->add_option("--lambda", cfg.lambda, "Comma-separated scaling per vertex")->required();
  CLI::App* tun = app.add_subcommand("tune", "Optimal bound gamma* and its horizons");
  model_opt(tun);
  horizon_opts(tun);
  CLI::App* bnd = app.add_subcommand("bound", "Horizon guarantees for a given gamma");
  bnd->add_option("--gamma", cfg.gamma, "Uniform bound gamma >= 1")->required();
  horizon_opts(bnd);
  CLI::App* val = app.add_subcommand("value", "Finite-horizon optimal cost");
  model_opt(val);
  val->add_option("--x0", cfg.x0, "xbar, zero or a comma-separated state");
  val->add_option("--horizon", cfg.horizon, "Horizon N")->required()->check(CLI::PositiveNumber);
  val->add_option("--export-lp", cfg.export_lp, "Write the LP in plain text");
  CLI::App* sim = app.add_subcommand("simulate", "Closed-loop simulation");
  model_opt(sim);
  sim->add_option("--controller", cfg.controller, "mpc, scaled or unconstrained")
      ->check(CLI::IsMember({"mpc", "scaled", "unconstrained"}));
  sim->add_option("--horizon", cfg.horizon,
                  "MPC horizon N (default: shortest with alpha_N > --alpha-min)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--alpha-min", cfg.alpha_min, "Target for the default MPC horizon")
      ->check(CLI::Range(0.0, 1.0));
  sim->add_option("--lambda", cfg.lambda, "Scaling for the scaled controller");
  sim->add_option("--x0", cfg.x0, "xbar, zero or a comma-separated state");
  sim->add_option("--steps", cfg.steps, "Maximum number of steps")->check(CLI::PositiveNumber);
  sim->add_option("--csv", cfg.csv_path, "Write the trajectory as CSV");
  sim->add_flag("--override-bounds", cfg.override_bounds,
                "Run the unconstrained feedback on a bounded model");
  CLI::App* rep = app.add_subcommand(
      "reproduce-paper", "Check the bundled reference instance against stored results");
  rep->add_option("--csv-dir", cfg.csv_dir, "Also write mpc.csv and scaled.csv here");

  std::vector<std::string> argv_storage = args;
  argv_storage.insert(argv_storage.begin(), "posroute");
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  cfg.lp.feasibility_tolerance = tolerance;
  cfg.lp.optimality_tolerance = tolerance;

  try {
    Json report;
    int code = kExitOk;
    if (*synth) {
      report = cmd_synthesize(cfg);
    } else if (*cert) {
      report = cmd_certify(cfg);
    } else if (*tun) {
      report = cmd_tune(cfg);
    } else if (*bnd) {
      report = cmd_bound(cfg);
    } else if (*val) {
      report = cmd_value(cfg);
    } else if (*sim) {
      report = cmd_simulate(cfg);
    } else if (*rep) {
      bool all_passed = false;
      report = cmd_reproduce(cfg, all_passed);
      if (!all_passed) code = kExitNumerical;
    }
    emit(cfg, report, out);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInput : kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace posroute::cli
