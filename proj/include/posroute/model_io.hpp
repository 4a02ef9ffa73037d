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

// JSON model files.
//
//   {
//     "n": 2,
//     "edges": [ {"from": 1, "to": 2,      "r": 0.0, "u_max": 0.5},
//                {"from": 2, "to": "goal", "r": 0.0, "u_max": 1.0} ],
//     "s": [1.0, 1.0],
//     "x_max": [1.0, 1.0]
//   }
//
// `r` defaults to 0. `x_max` and every `u_max` are either all present
// (bounded problem) or all absent (positivity constraints only). Unknown
// fields are rejected.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "posroute/error.hpp"
#include "posroute/graph_model.hpp"

namespace posroute {

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline void reject_unknown_fields(const nlohmann::json& obj,
                                  const std::set<std::string>& allowed,
                                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::kInvalidModel,
                  "unknown field '" + it.key() + "' in " + where);
    }
  }
}

inline double number_field(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) {
    throw Error(ErrorCode::kInvalidModel, where + " must be a number");
  }
  return v.get<double>();
}

inline Eigen::VectorXd number_array(const nlohmann::json& v, int expected,
                                    const std::string& where) {
  if (!v.is_array()) {
    throw Error(ErrorCode::kInvalidModel, where + " must be an array");
  }
  if (static_cast<int>(v.size()) != expected) {
    throw Error(ErrorCode::kInvalidModel,
                where + " has " + std::to_string(v.size()) +
                    " entries, expected " + std::to_string(expected));
  }
  Eigen::VectorXd out(expected);
  for (int i = 0; i < expected; ++i) {
    out(i) = number_field(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

}  // namespace detail

inline ProblemInstance parse_model(const nlohmann::json& doc) {
  using detail::number_array;
  using detail::number_field;
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidModel, "model must be a JSON object");
  }
  detail::reject_unknown_fields(doc, {"n", "edges", "s", "x_max"}, "model");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw Error(ErrorCode::kInvalidModel, "field 'n' must be an integer");
  }
  const int n = doc["n"].get<int>();
  if (n <= 0) throw Error(ErrorCode::kEmptyGraph, "n must be positive");
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw Error(ErrorCode::kInvalidModel, "field 'edges' must be an array");
  }
  if (!doc.contains("s")) {
    throw Error(ErrorCode::kInvalidModel, "field 's' is required");
  }

  const auto& jedges = doc["edges"];
  std::vector<EdgeInput> edges;
  Eigen::VectorXd r(static_cast<Eigen::Index>(jedges.size()));
  Eigen::VectorXd u(static_cast<Eigen::Index>(jedges.size()));
  int with_cap = 0;
  for (std::size_t k = 0; k < jedges.size(); ++k) {
    const auto& je = jedges[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (!je.is_object()) {
      throw Error(ErrorCode::kInvalidModel, where + " must be an object");
    }
    detail::reject_unknown_fields(je, {"from", "to", "r", "u_max"}, where);
    if (!je.contains("from") || !je["from"].is_number_integer()) {
      throw Error(ErrorCode::kInvalidModel, where + ".from must be an integer");
    }
    if (!je.contains("to")) {
      throw Error(ErrorCode::kInvalidModel, where + ".to is required");
    }
    EdgeInput e;
    e.from = je["from"].get<int>();
    const auto& to = je["to"];
    if (to.is_string()) {
      if (to.get<std::string>() != "goal") {
        throw Error(ErrorCode::kInvalidModel,
                    where + ".to must be a vertex number or \"goal\"");
      }
    } else if (to.is_number_integer()) {
      e.to = to.get<int>();
    } else {
      throw Error(ErrorCode::kInvalidModel,
                  where + ".to must be a vertex number or \"goal\"");
    }
    edges.push_back(e);
    const auto idx = static_cast<Eigen::Index>(k);
    r(idx) = je.contains("r") ? number_field(je["r"], where + ".r") : 0.0;
    if (je.contains("u_max")) {
      u(idx) = number_field(je["u_max"], where + ".u_max");
      ++with_cap;
    }
  }

  RoutingGraph graph(n, edges);
  Eigen::VectorXd s = number_array(doc["s"], n, "s");

  const bool has_x = doc.contains("x_max");
  const bool all_caps = with_cap == static_cast<int>(jedges.size());
  if (with_cap != 0 && !all_caps) {
    throw Error(ErrorCode::kInvalidBounds,
                "u_max must be given for every edge or for none");
  }
  if (has_x != (with_cap > 0) && !(has_x && jedges.empty())) {
    throw Error(ErrorCode::kInvalidBounds,
                "x_max and u_max must be given together");
  }
  std::optional<Eigen::VectorXd> x_max;
  std::optional<Eigen::VectorXd> u_max;
  if (has_x) {
    x_max = number_array(doc["x_max"], n, "x_max");
    u_max = u;
  }
  return make_instance(std::move(graph), std::move(s), r, std::move(x_max),
                       std::move(u_max));
}

inline ProblemInstance parse_model_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidModel, std::string("malformed JSON: ") + e.what());
  }
  return parse_model(doc);
}

inline ProblemInstance load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidModel, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

/// Canonical JSON form of an instance (canonical edge order, goal as "goal").
inline nlohmann::json to_json(const ProblemInstance& inst) {
  nlohmann::json doc;
  doc["n"] = inst.n();
  nlohmann::json edges = nlohmann::json::array();
  for (int k = 0; k < inst.m(); ++k) {
    const Edge& e = inst.graph.edge(k);
    nlohmann::json je;
    je["from"] = e.tail + 1;
    if (e.head == inst.graph.goal()) {
      je["to"] = "goal";
    } else {
      je["to"] = e.head + 1;
    }
    je["r"] = inst.costs.r(k);
    if (inst.bounds) je["u_max"] = inst.bounds->u_max(k);
    edges.push_back(je);
  }
  doc["edges"] = edges;
  doc["s"] = std::vector<double>(inst.costs.s.data(),
                                 inst.costs.s.data() + inst.n());
  if (inst.bounds) {
    doc["x_max"] = std::vector<double>(inst.bounds->x_max.data(),
                                       inst.bounds->x_max.data() + inst.n());
  }
  return doc;
}

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
inline std::string instance_hash(const ProblemInstance& inst) {
  const std::string text = to_json(inst).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace posroute
