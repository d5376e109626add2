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

#ifndef SBFL_CALL_GRAPH_H_
#define SBFL_CALL_GRAPH_H_

#include <set>
#include <utility>
#include <vector>

#include "sbfl/spectrum.h"

namespace sbfl {

// Directed caller -> callee edges between METHOD elements.
class CallGraph {
 public:
  using Edge = std::pair<ElementId, ElementId>;

  // Duplicate edges are ignored; first-insertion order is kept.
  void AddEdge(ElementId caller, ElementId callee);
  const std::vector<Edge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  // Elements reachable from `origin` within `radius` hops, ignoring edge
  // direction, paired with their shortest hop count. `origin` itself is
  // excluded. Sorted by id.
  std::vector<std::pair<ElementId, int>> Neighborhood(ElementId origin,
                                                      int radius) const;

  // Throws kDanglingReference for unregistered endpoints and
  // kInvalidHierarchy for endpoints that are not METHOD elements.
  void Validate(const Spectrum& spectrum) const;

  // Copy without edges whose endpoints are missing from `spectrum` or are no
  // longer methods.
  CallGraph RestrictedTo(const Spectrum& spectrum) const;

 private:
  std::vector<Edge> edges_;
  std::set<Edge> seen_;
};

}  // namespace sbfl

#endif  // SBFL_CALL_GRAPH_H_
