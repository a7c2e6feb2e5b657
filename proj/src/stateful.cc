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

#include "polsynth/stateful.h"

#include <algorithm>
#include <cstdint>

#include "polsynth/error.h"

namespace polsynth {

StatefulPolicy::StatefulPolicy(PolicyGraph graph, EdgeSet stateful)
    : graph_(std::move(graph)), stateful_(std::move(stateful)) {
  for (const Edge& e : stateful_) {
    if (!graph_.Contains(e)) {
      throw Error(ErrorKind::kStructural,
                  "stateful edge " + graph_.EdgeName(e) +
                      " is not a policy edge");
    }
  }
}

EdgeSet StatefulPolicy::Backflows() const {
  return Difference(ReverseEdges(stateful_), graph_.edges());
}

VerificationReport VerifyStateful(const StatefulPolicy& policy,
                                  std::span<const InvariantPtr> invariants) {
  const EdgeSet backflows = policy.Backflows();
  const PolicyGraph extended = policy.graph().WithEdges(backflows);

  VerificationReport report;
  for (std::size_t i = 0; i < invariants.size(); ++i) {
    const Invariant& inv = *invariants[i];
    InvariantResult r;
    r.index = i;
    r.label = inv.label();
    r.template_id = std::string(inv.template_id());
    r.kind = inv.kind();
    EdgeSet offending;
    for (const EdgeSet& set : inv.OffendingFlows(extended)) {
      offending = Union(offending, set);
    }
    if (inv.kind() == SecurityKind::kInformationFlow) {
      r.criterion = Criterion::kNoInformationFlowViolation;
      r.holds = inv.Holds(extended);
      if (!r.holds) r.offending = std::move(offending);
    } else {
      r.criterion = Criterion::kNoAccessControlSideEffects;
      // Violations confined to the answer flows are tolerated; anything
      // touching an original policy edge is a side effect.
      if (std::any_of(offending.begin(), offending.end(),
                      [&](const Edge& e) { return !backflows.contains(e); })) {
        r.holds = false;
        r.offending = std::move(offending);
      }
    }
    report.overall = report.overall && r.holds;
    report.per_invariant.push_back(std::move(r));
  }
  return report;
}

EdgeSet StatefulCandidates(const PolicyGraph& graph) {
  EdgeSet candidates;
  for (const Edge& e : graph.edges()) {
    if (!graph.Contains(e.reversed())) candidates.insert(candidates.end(), e);
  }
  return candidates;
}

namespace {

bool AllPhi(std::span<const InvariantPtr> invariants) {
  return std::all_of(invariants.begin(), invariants.end(),
                     [](const InvariantPtr& i) { return i->phi_structured(); });
}

}  // namespace

StatefulPolicy ComputeStateful(const PolicyGraph& graph,
                               std::span<const InvariantPtr> invariants,
                               std::span<const Edge> preferences) {
  if (!Verify(graph, invariants).overall) {
    throw Error(ErrorKind::kPrecondition,
                "policy fails verification; cannot compute stateful policy");
  }
  const EdgeSet candidates = StatefulCandidates(graph);

  if (AllPhi(invariants)) {
    std::vector<const Invariant*> flow;
    for (const auto& inv : invariants) {
      if (inv->kind() == SecurityKind::kInformationFlow) flow.push_back(inv.get());
    }
    EdgeSet stateful;
    for (const Edge& e : candidates) {
      if (std::all_of(flow.begin(), flow.end(), [&](const Invariant* inv) {
            return inv->Allows(e.receiver, e.sender);
          })) {
        stateful.insert(stateful.end(), e);
      }
    }
    return StatefulPolicy(graph, std::move(stateful));
  }

  std::vector<Edge> order;
  for (const Edge& e : preferences) {
    if (candidates.contains(e) &&
        std::find(order.begin(), order.end(), e) == order.end()) {
      order.push_back(e);
    }
  }
  for (const Edge& e : candidates) {
    if (std::find(order.begin(), order.end(), e) == order.end()) {
      order.push_back(e);
    }
  }
  EdgeSet stateful;
  for (const Edge& e : order) {
    EdgeSet trial = stateful;
    trial.insert(e);
    if (VerifyStateful(StatefulPolicy(graph, trial), invariants).overall) {
      stateful = std::move(trial);
    }
  }
  return StatefulPolicy(graph, std::move(stateful));
}

std::vector<EdgeSet> BruteForceStatefulOracle(
    const PolicyGraph& graph, std::span<const InvariantPtr> invariants,
    std::size_t max_edges) {
  const EdgeSet candidate_set = StatefulCandidates(graph);
  if (candidate_set.size() > max_edges || candidate_set.size() > 24) {
    throw Error(ErrorKind::kOracle,
                std::to_string(candidate_set.size()) +
                    " stateful candidates exceed the oracle guard of " +
                    std::to_string(max_edges));
  }
  const std::vector<Edge> candidates(candidate_set.begin(), candidate_set.end());
  const std::uint32_t k = static_cast<std::uint32_t>(candidates.size());

  std::vector<std::uint32_t> valid;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    EdgeSet subset;
    for (std::uint32_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) subset.insert(candidates[i]);
    }
    if (VerifyStateful(StatefulPolicy(graph, subset), invariants).overall) {
      valid.push_back(mask);
    }
  }

  std::vector<EdgeSet> maximal;
  for (std::uint32_t mask : valid) {
    const bool dominated = std::any_of(
        valid.begin(), valid.end(), [&](std::uint32_t other) {
          return other != mask && (other & mask) == mask;
        });
    if (dominated) continue;
    EdgeSet subset;
    for (std::uint32_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) subset.insert(candidates[i]);
    }
    maximal.push_back(std::move(subset));
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

}  // namespace polsynth
