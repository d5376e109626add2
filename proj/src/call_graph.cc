// Copyright 2026 The SBFL Engine Authors.
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

#include "sbfl/call_graph.h"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

#include "sbfl/error.h"

namespace sbfl {

void CallGraph::AddEdge(ElementId caller, ElementId callee) {
  if (seen_.insert({caller, callee}).second) {
    edges_.emplace_back(caller, callee);
  }
}

std::vector<std::pair<ElementId, int>> CallGraph::Neighborhood(
    ElementId origin, int radius) const {
  std::map<ElementId, std::vector<ElementId>> adjacency;
  for (const auto& [from, to] : edges_) {
    adjacency[from].push_back(to);
    adjacency[to].push_back(from);
  }
  std::map<ElementId, int> distance{{origin, 0}};
  std::deque<ElementId> queue{origin};
  while (!queue.empty()) {
    const ElementId node = queue.front();
    queue.pop_front();
    const int hops = distance[node];
    if (hops == radius) continue;
    const auto it = adjacency.find(node);
    if (it == adjacency.end()) continue;
    for (ElementId next : it->second) {
      if (distance.emplace(next, hops + 1).second) queue.push_back(next);
    }
  }
  distance.erase(origin);
  return {distance.begin(), distance.end()};
}

void CallGraph::Validate(const Spectrum& spectrum) const {
  for (const auto& [from, to] : edges_) {
    for (ElementId end : {from, to}) {
      if (!spectrum.Contains(end)) {
        throw Error(ErrorCode::kDanglingReference,
                    "call graph edge " + std::to_string(from.value) + " -> " +
                        std::to_string(to.value) + " references unknown element " +
                        std::to_string(end.value));
      }
      if (spectrum.element(end).kind != ElementKind::kMethod) {
        throw Error(ErrorCode::kInvalidHierarchy,
                    "call graph endpoint " + std::to_string(end.value) +
                        " is not a METHOD");
      }
    }
  }
}

CallGraph CallGraph::RestrictedTo(const Spectrum& spectrum) const {
  CallGraph out;
  auto is_method = [&](ElementId id) {
    return spectrum.Contains(id) &&
           spectrum.element(id).kind == ElementKind::kMethod;
  };
  for (const auto& [from, to] : edges_) {
    if (is_method(from) && is_method(to)) out.AddEdge(from, to);
  }
  return out;
}

}  // namespace sbfl
