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

#ifndef POLSYNTH_STATEFUL_H_
#define POLSYNTH_STATEFUL_H_

#include <span>
#include <vector>

#include "polsynth/graph.h"
#include "polsynth/invariants.h"
#include "polsynth/synthesis.h"

namespace polsynth {

// A policy whose `stateful` edges additionally admit answer packets in the
// reverse direction.
class StatefulPolicy {
 public:
  // Throws ErrorKind::kStructural unless stateful ⊆ graph.edges().
  StatefulPolicy(PolicyGraph graph, EdgeSet stateful);

  const PolicyGraph& graph() const { return graph_; }
  const EdgeSet& stateful() const { return stateful_; }

  // Reverse flows of stateful edges that are not already policy edges.
  EdgeSet Backflows() const;

  friend bool operator==(const StatefulPolicy&, const StatefulPolicy&) = default;

 private:
  PolicyGraph graph_;
  EdgeSet stateful_;
};

// Checks the two consistency criteria on the graph extended by the
// backflows B:
//  - information-flow invariants must hold on the extended graph;
//  - access-control invariants may be violated only by edges of B.
// Each entry of the report carries the criterion it checked.
VerificationReport VerifyStateful(const StatefulPolicy& policy,
                                  std::span<const InvariantPtr> invariants);

// Edges that may usefully be marked stateful: those whose reverse is not
// already a policy edge.
EdgeSet StatefulCandidates(const PolicyGraph& graph);

// Upgrades `graph` to a stateful policy.
//
// All-Φ scenarios take the linear path: a candidate (s, r) is marked iff
// every information-flow invariant allows (r, s). Otherwise candidates are
// tried greedily, `preferences` first and then canonical order, keeping each
// one iff the full stateful verification still passes.
//
// Throws ErrorKind::kPrecondition if `graph` fails Verify.
StatefulPolicy ComputeStateful(const PolicyGraph& graph,
                               std::span<const InvariantPtr> invariants,
                               std::span<const Edge> preferences = {});

// Exponential reference: all maximal subsets of StatefulCandidates(graph)
// that pass VerifyStateful, in lexicographic order of their sorted edge
// lists. Throws ErrorKind::kOracle if there are more than `max_edges`
// candidates.
std::vector<EdgeSet> BruteForceStatefulOracle(
    const PolicyGraph& graph, std::span<const InvariantPtr> invariants,
    std::size_t max_edges = 12);

}  // namespace polsynth

#endif  // POLSYNTH_STATEFUL_H_
