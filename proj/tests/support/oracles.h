// Copyright 2026 The polsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only reference computations. Nothing here calls the synthesis,
// stateful, or graph-search code it is used to check.

#ifndef POLSYNTH_TESTS_SUPPORT_ORACLES_H_
#define POLSYNTH_TESTS_SUPPORT_ORACLES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "polsynth/graph.h"
#include "polsynth/invariants.h"

namespace polsynth::testing {

using Matrix = std::vector<std::vector<bool>>;

// Floyd-Warshall transitive closure: closure[u][v] iff v is reachable from
// u over one or more edges.
inline Matrix TransitiveClosure(std::size_t n, const EdgeSet& edges) {
  Matrix m(n, std::vector<bool>(n, false));
  for (const Edge& e : edges) m[e.sender][e.receiver] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i][k] && m[k][j]) m[i][j] = true;
  return m;
}

// Edges lying on some walk from `from` to `to`, via the closure matrix.
inline EdgeSet WalkEdges(std::size_t n, const EdgeSet& edges, EntityId from,
                         EntityId to) {
  const Matrix c = TransitiveClosure(n, edges);
  EdgeSet out;
  if (!c[from][to]) return out;
  for (const Edge& e : edges) {
    const bool head = e.sender == from || c[from][e.sender];
    const bool tail = e.receiver == to || c[e.receiver][to];
    if (head && tail) out.insert(e);
  }
  return out;
}

// Edges lying on some simple path from `from` to `to`, by DFS enumeration
// of all simple paths.
inline EdgeSet SimplePathEdges(std::size_t n, const EdgeSet& edges,
                               EntityId from, EntityId to) {
  std::vector<std::vector<EntityId>> succ(n);
  for (const Edge& e : edges) succ[e.sender].push_back(e.receiver);
  EdgeSet out;
  std::vector<EntityId> path{from};
  std::vector<bool> on_path(n, false);
  on_path[from] = true;
  std::function<void(EntityId)> dfs = [&](EntityId v) {
    for (EntityId w : succ[v]) {
      if (w == to) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          out.insert({path[i], path[i + 1]});
        }
        out.insert({v, w});
        continue;
      }
      if (on_path[w]) continue;
      on_path[w] = true;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      on_path[w] = false;
    }
  };
  dfs(from);
  return out;
}

inline std::vector<Edge> AllPairs(std::size_t n) {
  std::vector<Edge> pairs;
  for (EntityId s = 0; s < n; ++s)
    for (EntityId r = 0; r < n; ++r)
      if (s != r) pairs.push_back({s, r});
  return pairs;
}

inline EdgeSet FromMask(const std::vector<Edge>& universe, std::uint32_t mask) {
  EdgeSet out;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (mask & (1u << i)) out.insert(universe[i]);
  return out;
}

// Enumerates every edge subset of the complete graph and returns the
// maximal ones on which all invariants hold.
inline std::vector<EdgeSet> MaximalSatisfyingPolicies(
    const EntitiesPtr& entities, const InvariantList& invariants) {
  const auto universe = AllPairs(entities->size());
  const auto k = static_cast<std::uint32_t>(universe.size());
  std::vector<std::uint32_t> valid;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    PolicyGraph g(entities, FromMask(universe, mask));
    bool ok = true;
    for (const auto& inv : invariants) ok = ok && inv->Holds(g);
    if (ok) valid.push_back(mask);
  }
  std::vector<EdgeSet> maximal;
  for (std::uint32_t m : valid) {
    bool dominated = false;
    for (std::uint32_t o : valid) dominated |= (o != m && (o & m) == m);
    if (!dominated) maximal.push_back(FromMask(universe, m));
  }
  return maximal;
}

}  // namespace polsynth::testing

#endif  // POLSYNTH_TESTS_SUPPORT_ORACLES_H_
