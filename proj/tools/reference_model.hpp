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

// Bundled reference instance, identical to models/example1.json.

namespace posroute::cli {

inline constexpr const char* kReferenceModel = R"json(
{
  "n": 5,
  "s": [10, 5, 1, 3, 2],
  "x_max": [1, 1, 1, 1, 1],
  "edges": [
    {"from": 1, "to": 2, "r": 1, "u_max": 0.25},
    {"from": 1, "to": 4, "r": 5, "u_max": 0.25},
    {"from": 1, "to": 5, "r": 5, "u_max": 0.25},
    {"from": 2, "to": 3, "r": 1, "u_max": 0.25},
    {"from": 2, "to": 4, "r": 1, "u_max": 0.25},
    {"from": 2, "to": 5, "r": 1, "u_max": 0.25},
    {"from": 3, "to": "goal", "r": 1, "u_max": 1},
    {"from": 4, "to": 3, "r": 1, "u_max": 1},
    {"from": 5, "to": 3, "r": 1, "u_max": 1}
  ]
}
)json";

}  // namespace posroute::cli
