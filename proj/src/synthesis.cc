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

#include "polsynth/synthesis.h"

#include <sstream>

#include "polsynth/error.h"

namespace polsynth {

std::string_view CriterionName(Criterion criterion) {
  switch (criterion) {
    case Criterion::kPolicy: return "policy";
    case Criterion::kNoInformationFlowViolation:
      return "no_information_flow_violation";
    case Criterion::kNoAccessControlSideEffects:
      return "no_access_control_side_effects";
  }
  return "unknown";
}

std::string VerificationReport::ToString(const Entities& entities) const {
  std::ostringstream out;
  out << (overall ? "PASS" : "FAIL") << "\n";
  for (const auto& r : per_invariant) {
    out << "  [" << (r.holds ? "ok" : "VIOLATED") << "] " << r.label << " ("
        << r.template_id << ", " << SecurityKindName(r.kind);
    if (r.criterion != Criterion::kPolicy) out << ", " << CriterionName(r.criterion);
    out << ")";
    if (!r.holds) out << ": " << FormatEdges(entities, r.offending);
    out << "\n";
  }
  return out.str();
}

PolicyGraph ConstructPolicy(const EntitiesPtr& entities,
                            std::span<const InvariantPtr> invariants) {
  for (const auto& inv : invariants) {
    if (!CheckDenyAll(*inv)) {
      throw Error(ErrorKind::kSynthesis,
                  "invariant '" + inv->label() +
                      "' does not hold for the deny-all policy");
    }
  }

  std::vector<const Invariant*> phi;
  std::vector<const Invariant*> generic;
  for (const auto& inv : invariants) {
    (inv->phi_structured() ? phi : generic).push_back(inv.get());
  }

  EdgeSet edges;
  const auto n = static_cast<EntityId>(entities->size());
  for (EntityId s = 0; s < n; ++s) {
    for (EntityId r = 0; r < n; ++r) {
      if (s == r) continue;
      bool allowed = true;
      for (const Invariant* inv : phi) {
        if (!inv->Allows(s, r)) {
          allowed = false;
          break;
        }
      }
      if (allowed) edges.insert(edges.end(), Edge{s, r});
    }
  }

  PolicyGraph graph(entities, std::move(edges));
  for (bool changed = true; changed;) {
    changed = false;
    for (const Invariant* inv : generic) {
      auto offending = inv->OffendingFlows(graph);
      if (offending.empty()) continue;
      graph = graph.WithoutEdges(offending.front());
      changed = true;
      break;
    }
  }
  return graph;
}

VerificationReport Verify(const PolicyGraph& graph,
                          std::span<const InvariantPtr> invariants) {
  VerificationReport report;
  for (std::size_t i = 0; i < invariants.size(); ++i) {
    const Invariant& inv = *invariants[i];
    InvariantResult r;
    r.index = i;
    r.label = inv.label();
    r.template_id = std::string(inv.template_id());
    r.kind = inv.kind();
    for (const EdgeSet& set : inv.OffendingFlows(graph)) {
      r.offending = Union(r.offending, set);
    }
    r.holds = inv.Holds(graph);
    report.overall = report.overall && r.holds;
    report.per_invariant.push_back(std::move(r));
  }
  return report;
}

PolicyGraph ApplyEdits(const PolicyGraph& graph,
                       std::span<const RefinementEdit> edits) {
  const Entities& entities = graph.entities();
  EdgeSet edges = graph.edges();
  for (std::size_t i = 0; i < edits.size(); ++i) {
    const RefinementEdit& edit = edits[i];
    const std::string path = "/" + std::to_string(i);
    auto from = entities.Find(edit.from);
    auto to = entities.Find(edit.to);
    if (!from || !to) {
      throw Error(ErrorKind::kEdit,
                  "edit references unknown entity '" +
                      (from ? edit.to : edit.from) + "'",
                  path + (from ? "/to" : "/from"));
    }
    if (*from == *to) {
      throw Error(ErrorKind::kEdit, "self-loop edit on '" + edit.from + "'",
                  path);
    }
    if (edit.op == RefinementEdit::Op::kAdd) {
      edges.insert(Edge{*from, *to});
    } else {
      edges.erase(Edge{*from, *to});
    }
  }
  return PolicyGraph(graph.entities_ptr(), std::move(edges));
}

std::pair<PolicyGraph, VerificationReport> Refine(
    const PolicyGraph& graph, std::span<const RefinementEdit> edits,
    std::span<const InvariantPtr> invariants) {
  PolicyGraph refined = ApplyEdits(graph, edits);
  VerificationReport report = Verify(refined, invariants);
  return {std::move(refined), std::move(report)};
}

}  // namespace polsynth
